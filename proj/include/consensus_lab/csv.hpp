#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "consensus_lab/model.hpp"

namespace consensus_lab {

/// Shortest text that round-trips the double (17 significant digits, '.' decimal point).
std::string format_double(double v);

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& s);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

/// Long format: header "row,column,value", one line per entry.
void write_matrix_csv(std::ostream& os, const Matrix& m, const std::vector<std::string>& rows,
                      const std::vector<std::string>& cols);

/// Header "label,<name>", one line per entry.
void write_vector_csv(std::ostream& os, const std::string& name, const Vector& v,
                      const std::vector<std::string>& labels);

}  // namespace consensus_lab
