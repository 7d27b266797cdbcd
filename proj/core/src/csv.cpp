#include "ctc/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ctc/errors.hpp"

namespace ctc {

namespace {

void append_double(std::string& out, double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

}  // namespace

std::vector<std::string> csv_columns(bool output_mode) {
    std::vector<std::string> cols = {
        "t",     "x",     "y",         "z",     "vx",    "vy",    "vz",
        "phi",   "theta", "psi",       "phi_dot", "theta_dot", "psi_dot",
        "s",     "e1",    "e2",        "delta_phi", "s_dot", "dist",
        "u1",    "u2",    "u3",        "u4",    "F1",    "F2",    "F3",    "F4"};
    if (output_mode) {
        static const char* kChan[4] = {"s", "e1", "e2", "dphi"};
        for (int lvl = 1; lvl <= 4; ++lvl) {
            for (const char* ch : kChan) {
                cols.push_back("xi_hat" + std::to_string(lvl) + "_" + ch);
            }
        }
        for (const char* ch : kChan) cols.push_back(std::string("sigma_hat_") + ch);
    }
    return cols;
}

void write_csv(const SimLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    const auto cols = csv_columns(log.output_mode);
    std::string line;
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) line += ',';
        line += cols[i];
    }
    out << line << '\n';

    for (size_t i = 0; i < log.size(); ++i) {
        line.clear();
        const QuadState& q = log.quad[i];
        const DeviationState& d = log.dev[i];
        double row[27] = {log.t[i],
                          q.position[0], q.position[1], q.position[2],
                          q.velocity[0], q.velocity[1], q.velocity[2],
                          q.attitude[0], q.attitude[1], q.attitude[2],
                          q.attitude_rate[0], q.attitude_rate[1], q.attitude_rate[2],
                          d.s, d.e1, d.e2, d.delta_phi,
                          log.xi[i].xi2[0], log.dist[i],
                          log.controls[i].u[0], log.controls[i].u[1],
                          log.controls[i].u[2], log.controls[i].u[3],
                          log.forces[i].f[0], log.forces[i].f[1],
                          log.forces[i].f[2], log.forces[i].f[3]};
        for (int j = 0; j < 27; ++j) {
            if (j) line += ',';
            append_double(line, row[j]);
        }
        if (log.output_mode) {
            const ObserverState& o = log.observer[i];
            for (int lvl = 0; lvl < 4; ++lvl) {
                for (int ch = 0; ch < 4; ++ch) {
                    line += ',';
                    append_double(line, o.xi_hat[lvl][ch]);
                }
            }
            for (int ch = 0; ch < 4; ++ch) {
                line += ',';
                append_double(line, o.sigma_hat[ch]);
            }
        }
        out << line << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    CsvData data;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV '" + path + "'");
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) data.columns.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(data.columns.size());
        const char* p = line.c_str();
        const char* end = p + line.size();
        while (p < end) {
            char* next = nullptr;
            row.push_back(std::strtod(p, &next));
            p = (next < end && *next == ',') ? next + 1 : next;
        }
        if (row.size() != data.columns.size()) {
            throw IoError("CSV row width mismatch in '" + path + "'");
        }
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace ctc
