#include "ssqa/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ssqa {

namespace {

void check_index(int i, int n, const char* what) {
  if (i < 0 || i >= n) {
    throw std::out_of_range(std::string(what) + " index " + std::to_string(i) +
                            " out of range for n=" + std::to_string(n));
  }
}

void check_size(size_t got, int n, const char* what) {
  if (got != size_t(n)) {
    throw std::invalid_argument(std::string(what) + " has length " +
                                std::to_string(got) + ", model has n=" +
                                std::to_string(n));
  }
}

}  // namespace

SpinVector bits_to_spins(const BitVector& x) {
  SpinVector s(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 1) throw std::invalid_argument("bit vector entry not 0/1");
    s[i] = x[i] ? 1 : -1;
  }
  return s;
}

BitVector spins_to_bits(const SpinVector& s) {
  BitVector x(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != 1 && s[i] != -1) {
      throw std::invalid_argument("spin vector entry not -1/+1");
    }
    x[i] = s[i] > 0 ? 1 : 0;
  }
  return x;
}

QuboModel::QuboModel(int n, double constant) : n_(n), constant_(constant) {
  if (n < 1) throw std::invalid_argument("QuboModel needs n >= 1");
  q_.assign(size_t(n) * n, 0.0);
}

size_t QuboModel::at(int i, int j) const {
  check_index(i, n_, "variable");
  check_index(j, n_, "variable");
  if (i > j) std::swap(i, j);
  return size_t(i) * n_ + j;
}

double QuboModel::coeff(int i, int j) const { return q_[at(i, j)]; }

void QuboModel::set_coeff(int i, int j, double value) { q_[at(i, j)] = value; }

void QuboModel::add_coeff(int i, int j, double value) { q_[at(i, j)] += value; }

double qubo_energy(const QuboModel& q, const BitVector& x) {
  check_size(x.size(), q.n(), "bit vector");
  double e = q.constant();
  for (int i = 0; i < q.n(); ++i) {
    if (x[i] > 1) throw std::invalid_argument("bit vector entry not 0/1");
    if (!x[i]) continue;
    e += q.coeff(i, i);
    for (int j = i + 1; j < q.n(); ++j) {
      if (x[j]) e += q.coeff(i, j);
    }
  }
  return e;
}

IsingModel::IsingModel(int n, double offset) : n_(n), offset_(offset) {
  if (n < 1) throw std::invalid_argument("IsingModel needs n >= 1");
  h_.assign(size_t(n), 0.0);
  j_.assign(size_t(n) * n, 0.0);
}

double IsingModel::bias(int i) const {
  check_index(i, n_, "spin");
  return h_[i];
}

void IsingModel::set_bias(int i, double value) {
  check_index(i, n_, "spin");
  h_[i] = value;
}

double IsingModel::coupling(int i, int j) const {
  check_index(i, n_, "spin");
  check_index(j, n_, "spin");
  return j_[size_t(i) * n_ + j];
}

void IsingModel::set_coupling(int i, int j, double value) {
  check_index(i, n_, "spin");
  check_index(j, n_, "spin");
  if (i == j) throw std::invalid_argument("coupling needs i != j");
  j_[size_t(i) * n_ + j] = value;
  j_[size_t(j) * n_ + i] = value;
}

double ising_energy(const IsingModel& m, const SpinVector& s) {
  check_size(s.size(), m.n(), "spin vector");
  double e = m.offset();
  for (int i = 0; i < m.n(); ++i) {
    if (s[i] != 1 && s[i] != -1) {
      throw std::invalid_argument("spin vector entry not -1/+1");
    }
    e -= m.bias(i) * s[i];
    const double* row = m.coupling_row(i);
    for (int j = i + 1; j < m.n(); ++j) {
      e -= row[j] * s[i] * s[j];
    }
  }
  return e;
}

double ising_flip_delta(const IsingModel& m, const SpinVector& s, int i) {
  check_size(s.size(), m.n(), "spin vector");
  check_index(i, m.n(), "spin");
  double field = m.bias(i);
  const double* row = m.coupling_row(i);
  for (int j = 0; j < m.n(); ++j) {
    field += row[j] * s[j];
  }
  return 2.0 * s[i] * field;
}

IsingModel qubo_to_ising(const QuboModel& q) {
  const int n = q.n();
  IsingModel m(n);
  double offset = q.constant();
  for (int i = 0; i < n; ++i) {
    double qd = q.coeff(i, i);
    double h = -0.5 * qd;
    offset += 0.5 * qd;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double qij = q.coeff(i, j);
      if (qij == 0.0) continue;
      h -= 0.25 * qij;
      if (j > i) {
        m.set_coupling(i, j, -0.25 * qij);
        offset += 0.25 * qij;
      }
    }
    m.set_bias(i, h);
  }
  m.set_offset(offset);
  return m;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

struct Entry {
  int i, j;
  double value;
};

Entry parse_entry(const std::string& line, const std::string& path) {
  std::istringstream ss(line);
  Entry e;
  if (!(ss >> e.i >> e.j >> e.value)) {
    throw std::runtime_error(path + ": bad entry line: " + line);
  }
  std::string extra;
  if (ss >> extra) throw std::runtime_error(path + ": trailing junk: " + line);
  return e;
}

}  // namespace

AnyModel load_model(const std::string& path) {
  auto lines = read_lines(path);
  size_t row = 0;
  while (row < lines.size() && blank_or_comment(lines[row])) ++row;
  if (row == lines.size()) throw std::runtime_error(path + ": empty model file");

  std::istringstream head(lines[row]);
  std::string kind;
  head >> kind;
  if (kind == "qubo") {
    int n = 0;
    double constant = 0.0;
    if (!(head >> n)) throw std::runtime_error(path + ": bad qubo header");
    head >> constant;  // optional
    QuboModel q(n, constant);
    for (++row; row < lines.size(); ++row) {
      if (blank_or_comment(lines[row])) continue;
      Entry e = parse_entry(lines[row], path);
      if (e.i > e.j) throw std::runtime_error(path + ": qubo entries need i <= j");
      q.set_coeff(e.i, e.j, e.value);
    }
    return q;
  }
  if (kind == "ising") {
    int n = 0;
    double offset = 0.0;
    if (!(head >> n >> offset)) throw std::runtime_error(path + ": bad ising header");
    IsingModel m(n, offset);
    bool in_bias = false;
    for (++row; row < lines.size(); ++row) {
      if (blank_or_comment(lines[row])) continue;
      std::istringstream probe(lines[row]);
      std::string word;
      probe >> word;
      if (word == "bias") {
        in_bias = true;
        continue;
      }
      Entry e = parse_entry(lines[row], path);
      if (in_bias) {
        if (e.i != e.j) throw std::runtime_error(path + ": bias entries need i == j");
        m.set_bias(e.i, e.value);
      } else {
        if (e.i >= e.j) {
          throw std::runtime_error(path + ": coupling entries need i < j");
        }
        m.set_coupling(e.i, e.j, e.value);
      }
    }
    return m;
  }
  throw std::runtime_error(path + ": unknown model kind '" + kind + "'");
}

void save_qubo(const QuboModel& q, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.precision(17);
  out << "qubo " << q.n();
  if (q.constant() != 0.0) out << " " << q.constant();
  out << "\n";
  for (int i = 0; i < q.n(); ++i) {
    for (int j = i; j < q.n(); ++j) {
      double v = q.coeff(i, j);
      if (v != 0.0) out << i << " " << j << " " << v << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_ising(const IsingModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.precision(17);
  out << "ising " << m.n() << " " << m.offset() << "\n";
  for (int i = 0; i < m.n(); ++i) {
    for (int j = i + 1; j < m.n(); ++j) {
      double v = m.coupling(i, j);
      if (v != 0.0) out << i << " " << j << " " << v << "\n";
    }
  }
  out << "bias\n";
  for (int i = 0; i < m.n(); ++i) {
    if (m.bias(i) != 0.0) out << i << " " << i << " " << m.bias(i) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ssqa
