#pragma once

// Generated by tests/oracle/oracle.py (scipy QUADPACK + numpy SVD).

namespace oracle {

inline constexpr double kDenseK250 = 1.32326183344;
inline constexpr double kDenseKIntensity250 = 1.31885661751;
inline constexpr double kDenseK50 = 3.40282409764;
inline constexpr double kDenseK5 = 11.8979475819;
inline constexpr double kCampaignK250 = 1.30586493259;
inline constexpr double kCampaignKIntensity250 = 1.3014980483;
inline constexpr double kAutoconvCentreRe = -893708424496.452;
inline constexpr double kAutoconvCentreIm = 0;
inline constexpr double kAutoconvOffsetRe = -69864991401.7154;
inline constexpr double kAutoconvOffsetIm = -266267143167.721;
inline constexpr double kAutoconvSigma = 82669125320.8404;
inline constexpr double kSpiralNullDetuning = 51707793178548.7;
inline constexpr double kSpiralNullSeparationNm = 133.050746586;

}  // namespace oracle
