#include "airbeam/instance_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace airbeam::io {

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view tok, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line, "expected a finite number, got '" + std::string(tok) + "'");
  }
  return v;
}

long parse_count(std::string_view tok, int line) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v <= 0) {
    throw ParseError(line, "expected a positive integer, got '" + std::string(tok) + "'");
  }
  return v;
}

std::string format(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Instance read_instance(std::istream& in) {
  std::string text;
  int line_no = 0;
  auto next_line = [&](std::vector<std::string_view>& toks) {
    while (std::getline(in, text)) {
      ++line_no;
      toks = tokens(text);
      if (!toks.empty()) return true;
    }
    return false;
  };

  std::vector<std::string_view> toks;
  if (!next_line(toks)) throw ParseError(line_no + 1, "missing header 'N K'");
  if (toks.size() != 2) throw ParseError(line_no, "header must be 'N K'");
  const long n = parse_count(toks[0], line_no);
  const long k = parse_count(toks[1], line_no);

  Instance inst;
  inst.H.resize(n, k);
  for (long d = 0; d < k; ++d) {
    for (long a = 0; a < n; ++a) {
      if (!next_line(toks)) {
        throw ParseError(line_no + 1, "expected " + std::to_string(n * k) +
                                          " channel entries, found " +
                                          std::to_string(d * n + a));
      }
      if (toks.size() != 2) throw ParseError(line_no, "channel entry must be 're im'");
      inst.H(a, d) = Complex(parse_double(toks[0], line_no), parse_double(toks[1], line_no));
    }
  }
  while (next_line(toks)) {
    if (toks.size() != 2) throw ParseError(line_no, "expected 'P <watts>' or 'sigma2 <watts>'");
    const double v = parse_double(toks[1], line_no);
    if (!(v >= 0.0)) throw ParseError(line_no, "value must be nonnegative");
    if (toks[0] == "P") {
      inst.power = v;
    } else if (toks[0] == "sigma2") {
      inst.noise_variance = v;
    } else {
      throw ParseError(line_no, "unknown key '" + std::string(toks[0]) + "'");
    }
  }
  return inst;
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  return read_instance(in);
}

void write_instance(std::ostream& out, const Instance& inst) {
  out << inst.H.rows() << ' ' << inst.H.cols() << '\n';
  for (Eigen::Index d = 0; d < inst.H.cols(); ++d) {
    for (Eigen::Index a = 0; a < inst.H.rows(); ++a) {
      out << format(inst.H(a, d).real()) << ' ' << format(inst.H(a, d).imag()) << '\n';
    }
  }
  if (inst.power) out << "P " << format(*inst.power) << '\n';
  if (inst.noise_variance) out << "sigma2 " << format(*inst.noise_variance) << '\n';
}

void write_instance_file(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file '" + path + "'");
  write_instance(out, inst);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace airbeam::io
