#include "ringjsa/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ringjsa/config.hpp"
#include "ringjsa/rng.hpp"

namespace ringjsa::io {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "containers are written in host byte order");

namespace {

constexpr char kMagic[8] = {'R', 'I', 'N', 'G', 'J', 'S', 'A', '1'};

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(path, mode);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    return in;
}

void put_doubles(std::ostream& out, const std::vector<double>& v)
{
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& in, std::size_t n, const std::string& path)
{
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(double)) throw ConfigError("'" + path + "' is truncated");
    return v;
}

double parse_number(std::string_view text, const std::string& path, std::size_t line)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) text.remove_suffix(1);
    if (text == "nan" || text == "NaN") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("'" + path + "' line " + std::to_string(line) + ": cannot parse '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

void write_container(const std::string& path, const Container& c)
{
    std::ofstream out = open_out(path, std::ios::binary);
    const std::string header = c.header.dump();
    const std::uint64_t len = header.size();
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    put_doubles(out, c.rows);
    put_doubles(out, c.cols);
    put_doubles(out, c.payload);
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

Container read_container(const std::string& path)
{
    std::ifstream in = open_in(path, std::ios::binary);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (in.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("'" + path + "' is not a ringjsa container");
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len > (1u << 30)) throw ConfigError("'" + path + "' has a corrupt header");
    std::string header(len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::uint64_t>(in.gcount()) != len) throw ConfigError("'" + path + "' is truncated");

    Container c;
    try {
        c.header = json::parse(header);
        const std::size_t rows = c.header.at("rows").get<std::size_t>();
        const std::size_t cols = c.header.at("cols").get<std::size_t>();
        const std::size_t values = c.header.at("payload_values").get<std::size_t>();
        c.rows = get_doubles(in, rows, path);
        c.cols = get_doubles(in, cols, path);
        c.payload = get_doubles(in, values, path);
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "' has an invalid header: " + e.what());
    }
    return c;
}

void write_jsa(const std::string& path, const ComplexJSA& jsa, const json& extra)
{
    Container c;
    c.header = extra;
    c.header["kind"] = "complex_jsa";
    c.header["rows"] = jsa.grid.n_signal();
    c.header["cols"] = jsa.grid.n_idler();
    c.header["payload_values"] = 2 * jsa.values.size();
    c.header["layout"] = "row-major interleaved (re, im)";
    c.header["axis_units"] = "rad/s";
    c.header["normalized"] = jsa.normalized;
    c.header["provenance"] = jsa.provenance;
    c.rows = jsa.grid.signal();
    c.cols = jsa.grid.idler();
    c.payload.resize(2 * static_cast<std::size_t>(jsa.values.size()));
    for (Eigen::Index k = 0; k < jsa.values.size(); ++k) {
        c.payload[2 * k] = jsa.values.data()[k].real();
        c.payload[2 * k + 1] = jsa.values.data()[k].imag();
    }
    write_container(path, c);
}

ComplexJSA read_jsa(const std::string& path, json* header)
{
    Container c = read_container(path);
    if (c.header.value("kind", "") != "complex_jsa") throw ConfigError("'" + path + "' does not hold a complex JSA");
    ComplexMatrix values(c.rows.size(), c.cols.size());
    if (c.payload.size() != 2 * static_cast<std::size_t>(values.size())) throw ConfigError("'" + path + "' payload size mismatch");
    for (Eigen::Index k = 0; k < values.size(); ++k) values.data()[k] = {c.payload[2 * k], c.payload[2 * k + 1]};
    ComplexJSA jsa(SpectralGrid(c.rows, c.cols), std::move(values), c.header.value("normalized", false));
    jsa.provenance = c.header.value("provenance", "");
    if (header) *header = c.header;
    return jsa;
}

void write_fringes(const std::string& path, const FringeScan& scan, const SpectralGrid& grid, std::uint64_t seed,
                   bool integer_counts)
{
    scan.validate();
    Container c;
    c.header["kind"] = "fringe_scan";
    c.header["rows"] = grid.n_signal();
    c.header["cols"] = grid.n_idler();
    c.header["steps"] = scan.schedule.size();
    c.header["schedule_rad"] = scan.schedule;
    c.header["payload_values"] = scan.counts.size();
    c.header["layout"] = "row-major [row][col][step]";
    c.header["axis_units"] = "rad/s";
    c.header["rng"] = {{"name", CounterRng::kName}, {"seed", seed}};
    c.header["integer_counts"] = integer_counts;
    c.rows = grid.signal();
    c.cols = grid.idler();
    c.payload = scan.counts;
    write_container(path, c);
}

FringeScan read_fringes(const std::string& path, SpectralGrid* grid)
{
    Container c = read_container(path);
    if (c.header.value("kind", "") != "fringe_scan") throw ConfigError("'" + path + "' does not hold a fringe scan");
    FringeScan scan;
    try {
        scan.schedule = c.header.at("schedule_rad").get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ConfigError("'" + path + "' lacks the phase schedule");
    }
    scan.rows = c.rows.size();
    scan.cols = c.cols.size();
    scan.counts = std::move(c.payload);
    scan.validate();
    if (grid) *grid = SpectralGrid(c.rows, c.cols);
    return scan;
}

void write_map_csv(const std::string& path, const RealMatrix& map, const SpectralGrid& grid, bool integers,
                   const std::string& corner)
{
    std::ofstream out = open_out(path);
    out << corner;
    for (double w : grid.idler()) out << ',' << format_number(units::omega_to_wavelength_nm(w));
    out << '\n';
    for (Eigen::Index r = 0; r < map.rows(); ++r) {
        out << format_number(units::omega_to_wavelength_nm(grid.signal()[r]));
        for (Eigen::Index c = 0; c < map.cols(); ++c)
            out << ',' << format_number(integers ? std::round(map(r, c)) : map(r, c));
        out << '\n';
    }
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

RealMatrix read_map_csv(const std::string& path, std::size_t rows, std::size_t cols)
{
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
    if (split(line).size() != cols + 1)
        throw ConfigError("'" + path + "' header has " + std::to_string(split(line).size() - 1) + " columns, expected " +
                          std::to_string(cols));
    RealMatrix m(rows, cols);
    std::size_t r = 0, lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        if (r >= rows) throw ConfigError("'" + path + "' has more than " + std::to_string(rows) + " data rows");
        const auto cells = split(line);
        if (cells.size() != cols + 1)
            throw ConfigError("'" + path + "' line " + std::to_string(lineno) + " has the wrong number of columns");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = parse_number(cells[c + 1], path, lineno);
        ++r;
    }
    if (r != rows) throw ConfigError("'" + path + "' has " + std::to_string(r) + " data rows, expected " + std::to_string(rows));
    return m;
}

void write_transfer_csv(const std::string& path, const std::vector<TransferSample>& samples)
{
    std::ofstream out = open_out(path);
    out << "lambda_nm,omega_rad_per_s,modulus,phase_rad\n";
    for (const auto& s : samples)
        out << format_number(units::omega_to_wavelength_nm(s.omega)) << ',' << format_number(s.omega) << ','
            << format_number(s.modulus) << ',' << format_number(s.phase) << '\n';
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

std::vector<TransferSample> read_transfer_csv(const std::string& path)
{
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
    std::vector<TransferSample> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() != 4) throw ConfigError("'" + path + "' line " + std::to_string(lineno) + ": expected 4 columns");
        out.push_back({parse_number(cells[1], path, lineno), parse_number(cells[2], path, lineno),
                       parse_number(cells[3], path, lineno)});
    }
    return out;
}

void write_json(const std::string& path, const json& j)
{
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

json read_json(const std::string& path)
{
    std::ifstream in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_measurement(const std::string& dir, const MeasurementSet& m, const json& provenance)
{
    fs::create_directories(dir);
    const fs::path d(dir);
    const SeedOrder order = m.campaign.seed_order;
    json cfg;
    cfg["format"] = "ringjsa-measurement";
    cfg["version"] = 1;
    cfg["rng"] = {{"name", CounterRng::kName}, {"seed", m.campaign.rng_seed}};
    cfg["integer_counts"] = m.integer_counts;
    cfg["campaign"] = campaign_to_json(m.campaign);
    cfg["grid"] = {{"rows_band", to_string(seeded_band(order))},
                   {"cols_band", to_string(detected_band(order))},
                   {"rows_rad_per_s", m.grid.signal()},
                   {"cols_rad_per_s", m.grid.idler()}};
    cfg["provenance"] = provenance;
    write_json((d / "campaign.cfg").string(), cfg);

    const std::string corner = std::string(to_string(seeded_band(order))) + "_nm\\" + to_string(detected_band(order)) + "_nm";
    write_map_csv((d / "i_res.csv").string(), m.i_res, m.grid, m.integer_counts, corner);
    write_map_csv((d / "i_spi.csv").string(), m.i_spi, m.grid, m.integer_counts, corner);
    write_map_csv((d / "i_int.csv").string(), m.i_int, m.grid, m.integer_counts, corner);
    write_fringes((d / "fringes.bin").string(), m.fringe, m.grid, m.campaign.rng_seed, m.integer_counts);
    write_transfer_csv((d / "t_h.csv").string(), m.transfer);
}

MeasurementSet read_measurement(const std::string& dir, json* cfg_out)
{
    const fs::path d(dir);
    if (!fs::is_directory(d)) throw ConfigError("measurement directory '" + dir + "' does not exist");
    std::vector<std::string> missing;
    for (const char* name : {"campaign.cfg", "i_res.csv", "i_spi.csv", "i_int.csv", "fringes.bin", "t_h.csv"})
        if (!fs::exists(d / name)) missing.emplace_back(name);
    if (!missing.empty()) {
        std::string list;
        for (const auto& f : missing) list += (list.empty() ? "" : ", ") + f;
        throw ConfigError("measurement directory '" + dir + "' is incomplete, missing: " + list);
    }

    const json cfg = read_json((d / "campaign.cfg").string());
    MeasurementSet m;
    try {
        m.campaign = campaign_from_json(cfg.at("campaign"));
        m.integer_counts = cfg.at("integer_counts").get<bool>();
        m.grid = SpectralGrid(cfg.at("grid").at("rows_rad_per_s").get<std::vector<double>>(),
                              cfg.at("grid").at("cols_rad_per_s").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw ConfigError("campaign.cfg in '" + dir + "': " + e.what());
    }
    const std::size_t rows = m.grid.n_signal(), cols = m.grid.n_idler();
    m.i_res = read_map_csv((d / "i_res.csv").string(), rows, cols);
    m.i_spi = read_map_csv((d / "i_spi.csv").string(), rows, cols);
    m.i_int = read_map_csv((d / "i_int.csv").string(), rows, cols);
    SpectralGrid fringe_grid;
    m.fringe = read_fringes((d / "fringes.bin").string(), &fringe_grid);
    if (!fringe_grid.matches(m.grid)) throw ConfigError("fringes.bin grid does not match campaign.cfg");
    m.transfer = read_transfer_csv((d / "t_h.csv").string());
    if (cfg_out) *cfg_out = cfg;
    return m;
}

}  // namespace ringjsa::io
