#include "odest/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace odest::io {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_real(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bad numeric field '" + s + "' in " + path.string());
    }
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json read_json_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    json j;
    in >> j;
    return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

void write_od_matrix_csv(const std::filesystem::path& path, const ODMatrix& m) {
    auto out = open_output(path);
    for (std::size_t i = 0; i < m.S; ++i) {
        for (std::size_t j = 0; j < m.S; ++j) {
            if (j) out << ',';
            out << format_real(m.alpha(i, j));
        }
        out << '\n';
    }
}

ODMatrix read_od_matrix_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& f : split_csv_line(line)) row.push_back(parse_real(f, path));
        rows.push_back(std::move(row));
    }
    ODMatrix m;
    m.S = rows.size();
    m.alpha = Mat::from_rows(rows);
    if (m.alpha.cols() != m.S) throw std::runtime_error("OD matrix CSV is not square: " + path.string());
    return m;
}

void write_od_matrix_json(const std::filesystem::path& path, const ODMatrix& m) {
    json j;
    j["S"] = m.S;
    auto& rows = j["alpha"] = json::array();
    for (std::size_t i = 0; i < m.S; ++i) {
        json row = json::array();
        for (std::size_t jj = 0; jj < m.S; ++jj) row.push_back(m.alpha(i, jj));
        rows.push_back(std::move(row));
    }
    if (m.structural_zeros) {
        auto& z = j["structural_zeros"] = json::array();
        for (std::size_t i = 0; i < m.S; ++i) {
            json row = json::array();
            for (std::size_t jj = 0; jj < m.S; ++jj)
                row.push_back((*m.structural_zeros)[i * m.S + jj] != 0);
            z.push_back(std::move(row));
        }
    }
    write_json_file(path, j);
}

ODMatrix read_od_matrix_json(const std::filesystem::path& path) {
    json j = read_json_file(path);
    ODMatrix m;
    m.S = j.at("S").get<std::size_t>();
    m.alpha = Mat(m.S, m.S);
    const auto& rows = j.at("alpha");
    if (rows.size() != m.S) throw std::runtime_error("alpha row count mismatch: " + path.string());
    for (std::size_t i = 0; i < m.S; ++i)
        for (std::size_t jj = 0; jj < m.S; ++jj) m.alpha(i, jj) = rows[i][jj].get<double>();
    if (j.contains("structural_zeros")) {
        std::vector<std::uint8_t> z(m.S * m.S, 0);
        for (std::size_t i = 0; i < m.S; ++i)
            for (std::size_t jj = 0; jj < m.S; ++jj)
                z[i * m.S + jj] = j["structural_zeros"][i][jj].get<bool>() ? 1 : 0;
        m.structural_zeros = std::move(z);
    }
    return m;
}

void write_count_matrix_csv(const std::filesystem::path& path, const Mat& m,
                            const std::vector<std::string>& labels) {
    if (labels.size() != m.cols())
        throw std::invalid_argument("write_count_matrix_csv: label count mismatch");
    auto out = open_output(path);
    out << "obs_id";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t n = 0; n < m.rows(); ++n) {
        out << n;
        for (std::size_t s = 0; s < m.cols(); ++s) out << ',' << format_real(m(n, s));
        out << '\n';
    }
}

Mat read_count_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* labels) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path.string());
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "obs_id")
        throw std::runtime_error("expected obs_id header column in " + path.string());
    if (labels) labels->assign(header.begin() + 1, header.end());
    const std::size_t cols = header.size() - 1;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != cols + 1)
            throw std::runtime_error("ragged CSV row in " + path.string());
        std::vector<double> row(cols);
        for (std::size_t s = 0; s < cols; ++s) row[s] = parse_real(fields[s + 1], path);
        rows.push_back(std::move(row));
    }
    return Mat::from_rows(rows);
}

void write_observation_set(const std::filesystem::path& x_path,
                           const std::filesystem::path& y_path, const ObservationSet& obs) {
    std::vector<std::string> labels = obs.station_labels;
    if (labels.empty())
        for (std::size_t s = 0; s < obs.S; ++s) labels.push_back("s" + std::to_string(s + 1));
    write_count_matrix_csv(x_path, obs.X, labels);
    write_count_matrix_csv(y_path, obs.Y, labels);
}

ObservationSet read_observation_set(const std::filesystem::path& x_path,
                                    const std::filesystem::path& y_path) {
    ObservationSet obs;
    obs.X = read_count_matrix_csv(x_path, &obs.station_labels);
    std::vector<std::string> y_labels;
    obs.Y = read_count_matrix_csv(y_path, &y_labels);
    if (y_labels != obs.station_labels)
        throw std::runtime_error("station labels differ between X and Y files");
    obs.N = obs.X.rows();
    obs.S = obs.X.cols();
    validate_observation_set(obs);
    return obs;
}

namespace {

void write_binned_matrix(const std::filesystem::path& path, const std::vector<Mat>& tensors,
                         const std::vector<std::string>& labels) {
    auto out = open_output(path);
    out << "obs_id,bin_id";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t n = 0; n < tensors.size(); ++n)
        for (std::size_t t = 0; t < tensors[n].rows(); ++t) {
            out << n << ',' << t;
            for (std::size_t s = 0; s < tensors[n].cols(); ++s)
                out << ',' << format_real(tensors[n](t, s));
            out << '\n';
        }
}

std::vector<Mat> read_binned_matrix(const std::filesystem::path& path, std::size_t n_obs,
                                    std::size_t n_bins, std::vector<std::string>* labels) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path.string());
    auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "obs_id" || header[1] != "bin_id")
        throw std::runtime_error("expected obs_id,bin_id header in " + path.string());
    if (labels) labels->assign(header.begin() + 2, header.end());
    const std::size_t cols = header.size() - 2;
    std::vector<Mat> tensors(n_obs, Mat(n_bins, cols));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != cols + 2)
            throw std::runtime_error("ragged CSV row in " + path.string());
        const auto n = static_cast<std::size_t>(parse_real(fields[0], path));
        const auto t = static_cast<std::size_t>(parse_real(fields[1], path));
        if (n >= n_obs || t >= n_bins)
            throw std::runtime_error("bin row out of range in " + path.string());
        for (std::size_t s = 0; s < cols; ++s) tensors[n](t, s) = parse_real(fields[s + 2], path);
    }
    return tensors;
}

}  // namespace

void write_binned_set(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                      const std::filesystem::path& meta_path, const BinnedObservationSet& b) {
    std::vector<std::string> labels = b.station_labels;
    if (labels.empty())
        for (std::size_t s = 0; s < b.S; ++s) labels.push_back("s" + std::to_string(s + 1));
    write_binned_matrix(x_path, b.Xb, labels);
    write_binned_matrix(y_path, b.Yb, labels);
    json meta;
    meta["S"] = b.S;
    meta["N"] = b.N;
    meta["T"] = b.T;
    meta["T_a"] = b.T_a;
    meta["bin_width_minutes"] = b.bin_width_minutes;
    meta["t0"] = b.t0;
    meta["t1"] = b.t1;
    meta["station_labels"] = labels;
    write_json_file(meta_path, meta);
}

BinnedObservationSet read_binned_set(const std::filesystem::path& x_path,
                                     const std::filesystem::path& y_path,
                                     const std::filesystem::path& meta_path) {
    json meta = read_json_file(meta_path);
    BinnedObservationSet b;
    b.S = meta.at("S").get<std::size_t>();
    b.N = meta.at("N").get<std::size_t>();
    b.T = meta.at("T").get<std::size_t>();
    b.T_a = meta.at("T_a").get<std::size_t>();
    b.bin_width_minutes = meta.at("bin_width_minutes").get<double>();
    b.t0 = meta.at("t0").get<int>();
    b.t1 = meta.at("t1").get<int>();
    b.Xb = read_binned_matrix(x_path, b.N, b.T, &b.station_labels);
    std::vector<std::string> y_labels;
    b.Yb = read_binned_matrix(y_path, b.N, b.T_a, &y_labels);
    if (y_labels != b.station_labels)
        throw std::runtime_error("station labels differ between Xb and Yb files");
    validate_binned_observation_set(b);
    return b;
}

void write_delay_table_csv(const std::filesystem::path& path, const TravelTimeTable& t) {
    auto out = open_output(path);
    for (std::size_t i = 0; i < t.S; ++i) {
        for (std::size_t j = 0; j < t.S; ++j) {
            if (j) out << ',';
            out << t.at(i, j);
        }
        out << '\n';
    }
}

TravelTimeTable read_delay_table_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& f : split_csv_line(line)) row.push_back(parse_real(f, path));
        rows.push_back(std::move(row));
    }
    TravelTimeTable t;
    t.S = rows.size();
    t.delays.assign(t.S * t.S, 0);
    for (std::size_t i = 0; i < t.S; ++i) {
        if (rows[i].size() != t.S)
            throw std::runtime_error("delay table CSV is not square: " + path.string());
        for (std::size_t j = 0; j < t.S; ++j) t.at(i, j) = static_cast<int>(rows[i][j]);
    }
    return t;
}

void write_draws(const std::filesystem::path& dir, const PosteriorDraws& draws) {
    std::filesystem::create_directories(dir);
    for (std::size_t c = 0; c < draws.chains; ++c) {
        auto out = open_output(dir / ("chain_" + std::to_string(c + 1) + ".csv"));
        for (std::size_t p = 0; p < draws.P(); ++p) {
            if (p) out << ',';
            out << draws.param_names[p];
        }
        out << ",divergent,tree_depth,step_size\n";
        for (std::size_t d = 0; d < draws.draws_per_chain; ++d) {
            for (std::size_t p = 0; p < draws.P(); ++p) {
                if (p) out << ',';
                out << format_real(draws.values[c](d, p));
            }
            out << ',' << int(draws.divergent[c][d]) << ',' << draws.tree_depth[c][d] << ','
                << format_real(draws.step_size[c]) << '\n';
        }
    }
    json adapt;
    adapt["chains"] = draws.chains;
    adapt["draws_per_chain"] = draws.draws_per_chain;
    adapt["step_size"] = draws.step_size;
    adapt["divergences"] = draws.divergence_count();
    write_json_file(dir / "adaptation.json", adapt);
}

PosteriorDraws read_draws(const std::filesystem::path& dir) {
    PosteriorDraws draws;
    std::vector<std::filesystem::path> files;
    for (std::size_t c = 1;; ++c) {
        auto p = dir / ("chain_" + std::to_string(c) + ".csv");
        if (!std::filesystem::exists(p)) break;
        files.push_back(p);
    }
    if (files.empty()) throw std::runtime_error("no chain_*.csv files in " + dir.string());
    draws.chains = files.size();
    for (const auto& path : files) {
        auto in = open_input(path);
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty draws file: " + path.string());
        auto header = split_csv_line(line);
        if (header.size() < 4) throw std::runtime_error("bad draws header: " + path.string());
        std::vector<std::string> names(header.begin(), header.end() - 3);
        if (draws.param_names.empty())
            draws.param_names = names;
        else if (draws.param_names != names)
            throw std::runtime_error("chain headers disagree in " + dir.string());
        const std::size_t P = names.size();
        std::vector<std::vector<double>> rows;
        std::vector<std::uint8_t> div;
        std::vector<int> depth;
        double step = 0.0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto fields = split_csv_line(line);
            if (fields.size() != P + 3) throw std::runtime_error("ragged draws row: " + path.string());
            std::vector<double> row(P);
            for (std::size_t p = 0; p < P; ++p) row[p] = parse_real(fields[p], path);
            rows.push_back(std::move(row));
            div.push_back(parse_real(fields[P], path) != 0.0 ? 1 : 0);
            depth.push_back(static_cast<int>(parse_real(fields[P + 1], path)));
            step = parse_real(fields[P + 2], path);
        }
        draws.values.push_back(Mat::from_rows(rows));
        draws.divergent.push_back(std::move(div));
        draws.tree_depth.push_back(std::move(depth));
        draws.step_size.push_back(step);
    }
    draws.draws_per_chain = draws.values.front().rows();
    for (const auto& v : draws.values)
        if (v.rows() != draws.draws_per_chain)
            throw std::runtime_error("chains have unequal draw counts in " + dir.string());
    return draws;
}

}  // namespace odest::io
