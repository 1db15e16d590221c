#include "platoon/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace platoon {

namespace {

nlohmann::json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

nlohmann::json vec_or_null(const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(number_or_null(x));
    return arr;
}

nlohmann::json matrix_rows(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void write_signal_csv(const std::string& path, double Ts, const Eigen::MatrixXd& signal) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "t";
    for (Eigen::Index i = 0; i < signal.cols(); ++i) out << ",veh" << i;
    out << "\n";
    char buf[64];
    for (Eigen::Index k = 0; k < signal.rows(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.6f", k * Ts);
        out << buf;
        for (Eigen::Index i = 0; i < signal.cols(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", signal(k, i));
            out << ',' << buf;
        }
        out << "\n";
    }
}

Eigen::MatrixXd read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV " + path);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) {
                first = false;  // drop the time column
                continue;
            }
            row.push_back(std::stod(cell));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return {};
    Eigen::MatrixXd m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw std::runtime_error("ragged CSV " + path);
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json_file(const std::string& path) {
    return nlohmann::json::parse(read_text_file(path));
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json report_to_json(const StabilityReport& report) {
    nlohmann::json j;
    j["l2_u"] = report.l2_u;
    j["ratio_u"] = vec_or_null(report.ratio_u);
    j["ratio_z"] = vec_or_null(report.ratio_z);
    j["peak_abs_e"] = report.peak_abs_e;
    j["max_ratio"] = number_or_null(report.max_ratio);
    j["string_stable"] = report.string_stable;
    j["tol"] = report.tol;
    j["first_platoon_pair"] = report.first_platoon_pair;
    return j;
}

nlohmann::json ensemble_to_json(const EnsembleSummary& summary) {
    nlohmann::json j;
    j["mc_runs"] = summary.mc_runs;
    j["master_seed"] = summary.master_seed;
    j["mean_u"] = matrix_rows(summary.mean_u);
    j["var_u"] = matrix_rows(summary.var_u);
    j["se_u"] = matrix_rows(summary.se_u);
    j["mean_e"] = matrix_rows(summary.mean_e);
    j["var_e"] = matrix_rows(summary.var_e);
    nlohmann::json tav = nlohmann::json::array();
    for (Eigen::Index i = 0; i < summary.time_avg_var_u.size(); ++i)
        tav.push_back(summary.time_avg_var_u(i));
    j["time_avg_var_u"] = tav;
    j["time_avg_var_u_total"] = summary.time_avg_var_u_total;
    j["time_avg_var_e_total"] = summary.time_avg_var_e_total;
    return j;
}

std::vector<std::string> write_run_directory(const std::string& dir, const SimRun& run,
                                             const StabilityReport& report,
                                             const nlohmann::json& meta) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const Eigen::MatrixXd& sig) {
        const std::string path = dir + "/" + name;
        write_signal_csv(path, run.Ts, sig);
        written.push_back(path);
    };
    emit("u.csv", run.u);
    emit("q.csv", run.q);
    emit("v.csv", run.v);
    emit("a.csv", run.a);
    emit("e.csv", run.e);
    emit("delta.csv", run.delta);
    emit("xhat_e.csv", run.xhat_e);
    emit("xhat_edot.csv", run.xhat_edot);
    emit("xhat_x3.csv", run.xhat_x3);
    write_json_file(dir + "/report.json", report_to_json(report));
    written.push_back(dir + "/report.json");
    write_json_file(dir + "/meta.json", meta);
    written.push_back(dir + "/meta.json");
    return written;
}

}  // namespace platoon
