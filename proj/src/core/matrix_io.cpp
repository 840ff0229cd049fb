#include "opstat/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "opstat/errors.hpp"

namespace opstat {
namespace {

using nlohmann::json;

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number())
    throw ValidationError("field " + where + " is not a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw ValidationError("field " + where + " is not finite");
  return x;
}

void fill_part(const json& arr, const char* name, int rows, int cols,
               ComplexMatrix& m, bool imag) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != rows)
    throw ValidationError(std::string("field ") + name + " must be an array of " +
                          std::to_string(rows) + " rows");
  for (int i = 0; i < rows; ++i) {
    const json& row = arr[i];
    std::ostringstream where;
    where << name << "[" << i << "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ValidationError("field " + where.str() + " must have " +
                            std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j) {
      std::ostringstream cell;
      cell << name << "[" << i << "][" << j << "]";
      const double x = finite_number(row[j], cell.str());
      if (imag)
        m(i, j) = cplx{m(i, j).real(), x};
      else
        m(i, j) = cplx{x, m(i, j).imag()};
    }
  }
}

}  // namespace

ComplexMatrix matrix_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("matrix document must be an object");

  int rows = 0, cols = 0;
  if (doc.contains("dim")) {
    if (!doc["dim"].is_number_integer() || doc["dim"].get<int>() < 1)
      throw ValidationError("field dim must be a positive integer");
    rows = cols = doc["dim"].get<int>();
  } else if (doc.contains("rows") && doc.contains("cols")) {
    if (!doc["rows"].is_number_integer() || doc["rows"].get<int>() < 1)
      throw ValidationError("field rows must be a positive integer");
    if (!doc["cols"].is_number_integer() || doc["cols"].get<int>() < 1)
      throw ValidationError("field cols must be a positive integer");
    rows = doc["rows"].get<int>();
    cols = doc["cols"].get<int>();
  } else {
    throw ValidationError("matrix document needs field dim (or rows/cols)");
  }
  if (!doc.contains("re")) throw ValidationError("missing field re");
  if (!doc.contains("im")) throw ValidationError("missing field im");

  ComplexMatrix m(rows, cols);
  fill_part(doc["re"], "re", rows, cols, m, false);
  fill_part(doc["im"], "im", rows, cols, m, true);
  return m;
}

ComplexMatrix matrix_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return matrix_from_json_text(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string matrix_to_json_text(const ComplexMatrix& m) {
  nlohmann::ordered_json doc;
  if (m.is_square())
    doc["dim"] = m.rows();
  else {
    doc["rows"] = m.rows();
    doc["cols"] = m.cols();
  }
  json re = json::array(), im = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  doc["re"] = std::move(re);
  doc["im"] = std::move(im);
  return doc.dump(2);
}

void matrix_to_json_file(const ComplexMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write matrix file: " + path);
  out << matrix_to_json_text(m) << "\n";
}

}  // namespace opstat
