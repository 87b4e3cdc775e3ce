#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "ringjsa/config.hpp"

namespace testutil {

/// Reference device with both buses carrying all the loss.
inline ringjsa::RingParams lossless_ring()
{
    ringjsa::RingParams ring = ringjsa::RingParams::reference_device();
    for (auto b : {ringjsa::Band::pump, ringjsa::Band::signal, ringjsa::Band::idler})
        ring.band(b).tau_e = 2.0 * ring.band(b).tau_tot;
    return ring;
}

/// Small campaign that still exercises every stage.
inline ringjsa::RunConfig small_config()
{
    ringjsa::RunConfig cfg = ringjsa::RunConfig::defaults();
    cfg.campaign.n_signal = 6;
    cfg.campaign.n_idler = 8;
    cfg.schmidt_points = 61;
    return cfg;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("ringjsa_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
