#include "vamp/csv.hpp"

#include "vamp/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace vamp::csv {

namespace {

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

} // namespace

double parse_double(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw data_error("non-numeric cell: '" + std::string(text) + "'");
    }
    return value;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw data_error("cannot open file: " + file.string());

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            const std::string_view cell = rest.substr(0, comma);
            try {
                row.push_back(parse_double(cell));
            } catch (const data_error& e) {
                throw data_error(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw data_error(file.string() + ":" + std::to_string(line_no) + ": ragged row, expected " +
                             std::to_string(rows.front().size()) + " columns, got " +
                             std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error("empty file: " + file.string());

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void write_matrix(const std::filesystem::path& file, const Eigen::MatrixXd& m) {
    std::ofstream out(file);
    if (!out) throw data_error("cannot write file: " + file.string());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw data_error("write failed: " + file.string());
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw data_error("cannot open file: " + file.string());
    std::map<std::string, std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw data_error(file.string() + ": expected key=value, got '" + std::string(t) + "'");
        }
        entries[std::string(trim(t.substr(0, eq)))] = std::string(trim(t.substr(eq + 1)));
    }
    return entries;
}

void write_key_values(const std::filesystem::path& file,
                      const std::map<std::string, std::string>& entries) {
    std::ofstream out(file);
    if (!out) throw data_error("cannot write file: " + file.string());
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
}

} // namespace vamp::csv
