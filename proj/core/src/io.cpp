#include "simfocus/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace simfocus {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string trial_csv(const std::vector<TrialResult>& rows) {
    std::string out = "trial,scheme,K,L,M,nmse,iterations,sum_rate_bps_hz,min_sinr_db,max_sinr_db\n";
    for (const auto& r : rows) {
        out += std::to_string(r.trial);
        out += ',';
        out += scheme_label(r.scheme);
        out += ',';
        out += std::to_string(r.users);
        out += ',';
        out += std::to_string(r.layers);
        out += ',';
        out += std::to_string(r.atoms);
        out += ',';
        if (r.failed) {
            out += "nan,0,nan,nan,nan\n";
            continue;
        }
        out += format_double(r.nmse);
        out += ',';
        out += std::to_string(r.iterations);
        out += ',';
        out += format_double(r.sum_rate_bps_hz);
        out += ',';
        out += format_double(r.min_sinr_db);
        out += ',';
        out += format_double(r.max_sinr_db);
        out += '\n';
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& sweep_key) {
    std::string out = "scheme," + sweep_key + ",trials,nmse_mean,nmse_std,sum_rate_mean,sum_rate_std\n";
    for (const auto& r : rows) {
        out += scheme_label(r.scheme);
        out += ',';
        out += std::to_string(r.sweep_value);
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        out += format_double(r.nmse_mean);
        out += ',';
        out += format_double(r.nmse_std);
        out += ',';
        out += format_double(r.sum_rate_mean);
        out += ',';
        out += format_double(r.sum_rate_std);
        out += '\n';
    }
    return out;
}

std::string heatmap_text(const HeatmapGrid& grid) {
    std::ostringstream out;
    out << "# " << format_double(grid.x_min) << ' ' << format_double(grid.x_max) << ' ' << grid.nx
        << '\n';
    out << "# " << format_double(grid.y_min) << ' ' << format_double(grid.y_max) << ' ' << grid.ny
        << '\n';
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            if (ix > 0) out << ' ';
            out << format_double(grid.energy[static_cast<std::size_t>(iy) * grid.nx + ix]);
        }
        out << '\n';
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace simfocus
