#include "epmat/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace epmat {

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw ParseError(path + ": cannot open");
  }

  /// Next nonempty line with comments stripped; false at end of input.
  bool next(std::string& out) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++lineno_;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const auto b = raw.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) continue;
      const auto e = raw.find_last_not_of(" \t\r\n");
      out = raw.substr(b, e - b + 1);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(path_ + ":" + std::to_string(lineno_) + ": " + msg);
  }

 private:
  std::ifstream in_;
  std::string path_;
  int lineno_ = 0;
};

std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

double number_token(const LineReader& r, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) r.fail("not a number: " + tok);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    r.fail("not a number: " + tok);
  }
}

int int_token(const LineReader& r, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) r.fail("not an integer: " + tok);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    r.fail("not an integer: " + tok);
  }
}

std::string read_name_line(LineReader& r) {
  std::string line;
  if (!r.next(line)) r.fail("missing name line");
  const auto toks = split_tokens(line);
  if (toks.size() != 2 || toks[0] != "name") {
    r.fail("expected: name <identifier>");
  }
  return toks[1];
}

int read_order_line(LineReader& r) {
  std::string line;
  if (!r.next(line)) r.fail("missing n line");
  const auto toks = split_tokens(line);
  if (toks.size() != 2 || toks[0] != "n") r.fail("expected: n <integer>");
  const int n = int_token(r, toks[1]);
  if (n < 1) r.fail("n must be at least 1");
  return n;
}

}  // namespace

NamedMatrix read_matrix_file(const std::string& path) {
  LineReader r(path);
  NamedMatrix doc;
  doc.name = read_name_line(r);
  const int n = read_order_line(r);
  doc.value.resize(n, n);
  for (int i = 0; i < n; ++i) {
    std::string line;
    if (!r.next(line)) r.fail("expected " + std::to_string(n) + " rows");
    const auto toks = split_tokens(line);
    if (static_cast<int>(toks.size()) != n) {
      r.fail("expected " + std::to_string(n) + " entries in the row");
    }
    for (int j = 0; j < n; ++j) doc.value(i, j) = number_token(r, toks[j]);
  }
  std::string extra;
  if (r.next(extra)) r.fail("unexpected trailing content");
  if (!doc.value.allFinite()) r.fail("non-finite entries");
  return doc;
}

NamedVector read_vector_file(const std::string& path) {
  LineReader r(path);
  NamedVector doc;
  doc.name = read_name_line(r);
  const int n = read_order_line(r);
  doc.value.resize(n);
  int filled = 0;
  std::string line;
  while (filled < n && r.next(line)) {
    for (const std::string& tok : split_tokens(line)) {
      if (filled >= n) r.fail("more than " + std::to_string(n) + " entries");
      doc.value(filled++) = number_token(r, tok);
    }
  }
  if (filled < n) r.fail("expected " + std::to_string(n) + " entries");
  if (r.next(line)) r.fail("unexpected trailing content");
  if (!doc.value.allFinite()) r.fail("non-finite entries");
  return doc;
}

Scenario read_scenario_file(const std::string& path) {
  LineReader r(path);
  Scenario sc;
  sc.name = read_name_line(r);
  sc.graph.n = read_order_line(r);
  bool have_grid = false;
  std::string line;
  while (r.next(line)) {
    const auto toks = split_tokens(line);
    if (toks[0] == "arc") {
      if (toks.size() != 4) r.fail("expected: arc <from> <to> <weight>");
      Arc a;
      a.from = int_token(r, toks[1]);
      a.to = int_token(r, toks[2]);
      a.weight = number_token(r, toks[3]);
      sc.graph.arcs.push_back(a);
    } else if (toks[0] == "x0") {
      if (static_cast<int>(toks.size()) != sc.graph.n + 1) {
        r.fail("expected " + std::to_string(sc.graph.n) +
               " entries after x0");
      }
      Vector v(sc.graph.n);
      for (int i = 0; i < sc.graph.n; ++i) {
        v(i) = number_token(r, toks[i + 1]);
      }
      sc.x0s.push_back(std::move(v));
    } else if (toks[0] == "grid") {
      if (toks.size() != 4) {
        r.fail("expected: grid <t_max> <points> <spacing>");
      }
      sc.grid.t_max = number_token(r, toks[1]);
      sc.grid.points = int_token(r, toks[2]);
      try {
        sc.grid.spacing = spacing_from_string(toks[3]);
      } catch (const ParseError&) {
        r.fail("spacing must be linear, log, or both");
      }
      if (!(sc.grid.t_max > 0.0)) r.fail("t_max must be positive");
      if (sc.grid.points < 1) r.fail("points must be at least 1");
      have_grid = true;
    } else {
      r.fail("unknown directive: " + toks[0]);
    }
  }
  if (!have_grid) r.fail("missing grid line");
  try {
    validate(sc.graph);
  } catch (const DomainError& e) {
    r.fail(e.what());
  }
  return sc;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_matrix_file(const std::string& path, const NamedMatrix& doc) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open for writing");
  out << "name " << doc.name << "\n";
  out << "n " << doc.value.rows() << "\n";
  for (Eigen::Index i = 0; i < doc.value.rows(); ++i) {
    for (Eigen::Index j = 0; j < doc.value.cols(); ++j) {
      if (j) out << " ";
      out << format_double(doc.value(i, j));
    }
    out << "\n";
  }
  if (!out) throw Error(path + ": write failed");
}

void write_vector_file(const std::string& path, const NamedVector& doc) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open for writing");
  out << "name " << doc.name << "\n";
  out << "n " << doc.value.size() << "\n";
  for (Eigen::Index i = 0; i < doc.value.size(); ++i) {
    out << format_double(doc.value(i)) << "\n";
  }
  if (!out) throw Error(path + ": write failed");
}

const char* to_string(GridSpacing s) {
  switch (s) {
    case GridSpacing::linear: return "linear";
    case GridSpacing::log: return "log";
    case GridSpacing::both: return "both";
  }
  return "?";
}

GridSpacing spacing_from_string(const std::string& s) {
  if (s == "linear") return GridSpacing::linear;
  if (s == "log") return GridSpacing::log;
  if (s == "both") return GridSpacing::both;
  throw ParseError("unknown grid spacing: " + s);
}

std::vector<double> make_time_grid(const GridSpec& spec) {
  if (!(spec.t_max > 0.0) || !std::isfinite(spec.t_max)) {
    throw DomainError("make_time_grid: t_max must be positive and finite");
  }
  if (spec.points < 1) {
    throw DomainError("make_time_grid: points must be at least 1");
  }
  std::vector<double> grid;
  auto add_linear = [&] {
    if (spec.points == 1) {
      grid.push_back(spec.t_max);
      return;
    }
    for (int i = 0; i < spec.points; ++i) {
      grid.push_back(spec.t_max * i / (spec.points - 1));
    }
  };
  auto add_log = [&] {
    const double lo = std::max(1e-3, spec.t_max * 1e-4);
    if (spec.points == 1 || lo >= spec.t_max) {
      grid.push_back(spec.t_max);
      return;
    }
    for (int i = 0; i < spec.points; ++i) {
      grid.push_back(lo *
                     std::pow(spec.t_max / lo, i / (spec.points - 1.0)));
    }
  };
  switch (spec.spacing) {
    case GridSpacing::linear:
      add_linear();
      break;
    case GridSpacing::log:
      add_log();
      break;
    case GridSpacing::both:
      add_linear();
      add_log();
      break;
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) {
                           return std::abs(a - b) <=
                                  1e-12 * std::max(std::abs(a),
                                                   std::abs(b));
                         }),
             grid.end());
  return grid;
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header, const Matrix& rows) {
  if (static_cast<Eigen::Index>(header.size()) != rows.cols()) {
    throw DomainError("write_csv: header width must match the data");
  }
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open for writing");
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ",";
    out << header[j];
  }
  out << "\n";
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      if (j) out << ",";
      out << format_double(rows(i, j));
    }
    out << "\n";
  }
  if (!out) throw Error(path + ": write failed");
}

std::uint64_t fnv1a64(const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(bytes.data(), bytes.size())));
  return out;
}

}  // namespace epmat
