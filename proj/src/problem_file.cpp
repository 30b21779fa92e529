#include "pdqp/problem_file.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <sstream>
#include <vector>

namespace pdqp {

ParseError::ParseError(const std::string& origin, int line, const std::string& what)
    : ModelError(line > 0 ? origin + ":" + std::to_string(line) + ": " + what
                          : origin + ": " + what),
      line_(line) {}

std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream ls(raw);
    Line l{number, {}};
    for (std::string t; ls >> t;) l.tokens.push_back(t);
    if (!l.tokens.empty()) out.push_back(std::move(l));
  }
  return out;
}

class Parser {
 public:
  Parser(std::string origin, std::vector<Line> lines)
      : origin_(std::move(origin)), lines_(std::move(lines)) {}

  GeneralQp parse() {
    if (lines_.empty()) fail(0, "empty file, expected header \"QPT 1\"");
    const Line& h = lines_[0];
    if (h.tokens.size() != 2 || h.tokens[0] != "QPT")
      fail(h.number, "expected header \"QPT 1\"");
    if (h.tokens[1] != "1") fail(h.number, "unsupported format version " + h.tokens[1]);
    pos_ = 1;

    bool ended = false;
    while (pos_ < lines_.size()) {
      const Line& l = lines_[pos_++];
      const std::string& kw = l.tokens[0];
      if (ended) fail(l.number, "content after \"end\"");
      if (kw != "name" && kw != "dims" && kw != "end" && !have_dims_)
        fail(l.number, "\"" + kw + "\" before \"dims\"");
      if (!seen_.insert(kw).second) fail(l.number, "repeated section \"" + kw + "\"");
      if (kw == "name") {
        expect_count(l, 2);
        g_.name = l.tokens[1];
      } else if (kw == "dims") {
        expect_count(l, 3);
        n_ = parse_index(l, l.tokens[1], 1);
        m_ = parse_index(l, l.tokens[2], 0);
        have_dims_ = true;
        g_.Hhat = Matrix::Zero(n_, n_);
        g_.Ahat = Matrix::Zero(m_, n_);
        g_.c = Vector::Zero(n_);
        g_.lower = Vector::Zero(n_ + m_);
        g_.upper = Vector::Constant(n_ + m_, kInf);
      } else if (kw == "hessian") {
        parse_hessian(l);
      } else if (kw == "constraints") {
        parse_constraints(l);
      } else if (kw == "objective") {
        g_.c = parse_vector(l, n_, false);
      } else if (kw == "lower") {
        g_.lower = parse_vector(l, n_ + m_, true);
      } else if (kw == "upper") {
        g_.upper = parse_vector(l, n_ + m_, true);
      } else if (kw == "end") {
        expect_count(l, 1);
        ended = true;
      } else {
        fail(l.number, "unknown keyword \"" + kw + "\"");
      }
    }
    if (!have_dims_) fail(0, "missing \"dims\"");
    if (!ended) fail(0, "missing \"end\"");
    try {
      validate(g_);
    } catch (const ModelError& e) {
      fail(line_of("lower"), e.what());
    }
    return g_;
  }

 private:
  [[noreturn]] void fail(int line, const std::string& what) const {
    throw ParseError(origin_, line, what);
  }

  int line_of(const std::string& kw) const {
    for (const auto& l : lines_)
      if (l.tokens[0] == kw) return l.number;
    return 0;
  }

  void expect_count(const Line& l, size_t k) const {
    if (l.tokens.size() != k)
      fail(l.number, "\"" + l.tokens[0] + "\" takes " + std::to_string(k - 1) + " argument(s)");
  }

  Index parse_index(const Line& l, const std::string& t, Index min) const {
    long v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || v < min)
      fail(l.number, "bad integer \"" + t + "\"");
    return static_cast<Index>(v);
  }

  double parse_value(const Line& l, const std::string& t, bool allow_inf) const {
    double v = 0;
    if (t == "inf" || t == "+inf") v = kInf;
    else if (t == "-inf") v = -kInf;
    else {
      const char* b = t.data();
      if (*b == '+') ++b;
      auto [p, ec] = std::from_chars(b, t.data() + t.size(), v);
      if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
        fail(l.number, "bad number \"" + t + "\"");
    }
    if (std::isinf(v) && !allow_inf) fail(l.number, "infinite value not allowed here");
    return v;
  }

  Vector parse_vector(const Line& l, Index len, bool allow_inf) const {
    if (static_cast<Index>(l.tokens.size()) != len + 1)
      fail(l.number, "\"" + l.tokens[0] + "\" expects " + std::to_string(len) + " values, got " +
                         std::to_string(l.tokens.size() - 1));
    Vector v(len);
    for (Index i = 0; i < len; ++i)
      v[i] = parse_value(l, l.tokens[static_cast<size_t>(i + 1)], allow_inf);
    return v;
  }

  const Line& next_line(const Line& owner) {
    if (pos_ >= lines_.size()) fail(owner.number, "unexpected end of file in \"" + owner.tokens[0] + "\"");
    return lines_[pos_++];
  }

  // Returns the declared block kind and, for triplets, the count.
  std::pair<bool, Index> block_header(const Line& l) const {
    if (l.tokens.size() >= 2 && l.tokens[1] == "dense") {
      expect_count(l, 2);
      return {true, 0};
    }
    if (l.tokens.size() >= 2 && l.tokens[1] == "triplet") {
      expect_count(l, 3);
      return {false, parse_index(l, l.tokens[2], 0)};
    }
    fail(l.number, "expected \"" + l.tokens[0] + " dense\" or \"" + l.tokens[0] + " triplet <count>\"");
  }

  void parse_hessian(const Line& l) {
    auto [dense, count] = block_header(l);
    if (dense) {
      std::vector<int> row_line(static_cast<size_t>(n_));
      for (Index i = 0; i < n_; ++i) {
        const Line& r = next_line(l);
        row_line[static_cast<size_t>(i)] = r.number;
        if (static_cast<Index>(r.tokens.size()) != n_)
          fail(r.number, "hessian row expects " + std::to_string(n_) + " values");
        for (Index j = 0; j < n_; ++j)
          g_.Hhat(i, j) = parse_value(r, r.tokens[static_cast<size_t>(j)], false);
      }
      for (Index i = 0; i < n_; ++i)
        for (Index j = 0; j < i; ++j)
          if (g_.Hhat(i, j) != g_.Hhat(j, i))
            fail(row_line[static_cast<size_t>(i)], "hessian is not symmetric at (" +
                                                       std::to_string(i + 1) + "," +
                                                       std::to_string(j + 1) + ")");
      return;
    }
    std::map<std::pair<Index, Index>, std::pair<double, int>> seen;
    for (Index k = 0; k < count; ++k) {
      const Line& r = next_line(l);
      auto [i, j, v] = triplet(r, n_, n_);
      if (seen.count({i, j})) fail(r.number, "duplicate hessian entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      if (auto it = seen.find({j, i}); it != seen.end() && it->second.first != v)
        fail(r.number, "non-symmetric hessian entries (" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + ") and line " +
                           std::to_string(it->second.second));
      seen[{i, j}] = {v, r.number};
      g_.Hhat(i, j) = g_.Hhat(j, i) = v;
    }
  }

  void parse_constraints(const Line& l) {
    auto [dense, count] = block_header(l);
    if (dense) {
      for (Index i = 0; i < m_; ++i) {
        const Line& r = next_line(l);
        if (static_cast<Index>(r.tokens.size()) != n_)
          fail(r.number, "constraint row expects " + std::to_string(n_) + " values");
        for (Index j = 0; j < n_; ++j)
          g_.Ahat(i, j) = parse_value(r, r.tokens[static_cast<size_t>(j)], false);
      }
      return;
    }
    std::map<std::pair<Index, Index>, int> seen;
    for (Index k = 0; k < count; ++k) {
      const Line& r = next_line(l);
      auto [i, j, v] = triplet(r, m_, n_);
      if (seen.count({i, j})) fail(r.number, "duplicate constraint entry");
      seen[{i, j}] = r.number;
      g_.Ahat(i, j) = v;
    }
  }

  std::tuple<Index, Index, double> triplet(const Line& r, Index rows, Index cols) const {
    if (r.tokens.size() != 3) fail(r.number, "triplet row needs \"i j value\"");
    const Index i = parse_index(r, r.tokens[0], 1) - 1;
    const Index j = parse_index(r, r.tokens[1], 1) - 1;
    if (i >= rows || j >= cols) fail(r.number, "triplet index out of range");
    return {i, j, parse_value(r, r.tokens[2], false)};
  }

  std::string origin_;
  std::vector<Line> lines_;
  size_t pos_ = 0;
  GeneralQp g_;
  Index n_ = 0, m_ = 0;
  bool have_dims_ = false;
  std::set<std::string> seen_;
};

}  // namespace

GeneralQp parse_problem_text(const std::string& text, const std::string& origin) {
  return Parser(origin, split_lines(text)).parse();
}

GeneralQp parse_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  GeneralQp g = parse_problem_text(ss.str(), path);
  if (g.name.empty()) g.name = std::filesystem::path(path).stem().string();
  return g;
}

std::string write_problem(const GeneralQp& g) {
  validate(g);
  const Index n = g.n(), m = g.m();
  std::ostringstream os;
  os << "QPT 1\n";
  if (!g.name.empty()) os << "name " << g.name << "\n";
  os << "dims " << n << " " << m << "\n";

  std::vector<std::string> rows;
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i)
      if (g.Hhat(i, j) != 0)
        rows.push_back(std::to_string(i + 1) + " " + std::to_string(j + 1) + " " +
                       format_double(g.Hhat(i, j)));
  os << "hessian triplet " << rows.size() << "\n";
  for (const auto& r : rows) os << r << "\n";

  rows.clear();
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (g.Ahat(i, j) != 0)
        rows.push_back(std::to_string(i + 1) + " " + std::to_string(j + 1) + " " +
                       format_double(g.Ahat(i, j)));
  os << "constraints triplet " << rows.size() << "\n";
  for (const auto& r : rows) os << r << "\n";

  auto vec = [&](const char* kw, const Vector& v) {
    os << kw;
    for (Index i = 0; i < v.size(); ++i) os << " " << format_double(v[i]);
    os << "\n";
  };
  vec("objective", g.c);
  vec("lower", g.lower);
  vec("upper", g.upper);
  os << "end\n";
  return os.str();
}

void write_problem_file(const GeneralQp& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << write_problem(g);
  if (!out) throw std::runtime_error("write failed: " + path);
}

bool same_data(const GeneralQp& a, const GeneralQp& b) {
  auto eq = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x.array() == y.array()).all();
  };
  return a.name == b.name && eq(a.Hhat, b.Hhat) && eq(a.Ahat, b.Ahat) && eq(a.c, b.c) &&
         eq(a.lower, b.lower) && eq(a.upper, b.upper);
}

}  // namespace pdqp
