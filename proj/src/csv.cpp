#include "consensus_lab/csv.hpp"

#include <cmath>
#include <cstdio>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    if (v == 0.0) return "0";  // also folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) os << ',';
        os << csv_field(fields[k]);
    }
    os << '\n';
}

void write_matrix_csv(std::ostream& os, const Matrix& m, const std::vector<std::string>& rows,
                      const std::vector<std::string>& cols) {
    if (static_cast<Eigen::Index>(rows.size()) != m.rows() || static_cast<Eigen::Index>(cols.size()) != m.cols())
        throw PreconditionError("matrix labels do not match its shape");
    write_csv_row(os, {"row", "column", "value"});
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            write_csv_row(os, {rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)], format_double(m(r, c))});
}

void write_vector_csv(std::ostream& os, const std::string& name, const Vector& v,
                      const std::vector<std::string>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != v.size()) throw PreconditionError("vector labels do not match its length");
    write_csv_row(os, {"label", name});
    for (Eigen::Index k = 0; k < v.size(); ++k) write_csv_row(os, {labels[static_cast<std::size_t>(k)], format_double(v(k))});
}

}  // namespace consensus_lab
