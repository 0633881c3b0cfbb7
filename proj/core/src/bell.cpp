#include "bellthresh/bell.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bellthresh::bell {

namespace {

// Shorthand for building the preset tables with 1-based indices.
JointTerm jt(int sign, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
  return {i - 1, j - 1, k - 1, l - 1, sign};
}

SingleTerm st(int sign, Party party, std::size_t i, std::size_t k) {
  return {party, i - 1, k - 1, sign};
}

std::vector<SingleTerm> qutrit_singles() {
  return {st(-1, Party::A, 1, 1), st(-1, Party::A, 1, 2), st(-1, Party::B, 2, 1),
          st(-1, Party::B, 2, 2)};
}

std::vector<JointTerm> qutrit_joint(bool as_printed) {
  return {
      jt(+1, 1, 1, 2, 1), jt(+1, 1, 2, 2, 1), jt(-1, 2, 1, 2, 1), jt(+1, 2, 2, 2, 1),
      jt(+1, 1, 1, 1, 2), jt(+1, 1, 2, 1, 2), jt(-1, 2, 1, 1, 2), jt(+1, 2, 2, 1, 2),
      jt(+1, 1, 1, 2, 2), jt(+1, 1, 2, 1, 1), jt(-1, 2, 1, 2, 2),
      as_printed ? jt(+1, 2, 2, 2, 1) : jt(+1, 2, 2, 2, 2),
  };
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw std::invalid_argument("functional table line " + std::to_string(line) + ": " + msg);
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    parse_error(line, "expected an index, got '" + tok + "'");
  }
  if (pos != tok.size() || v < 1) parse_error(line, "indices are 1-based positive integers");
  return static_cast<std::size_t>(v - 1);
}

int parse_sign(const std::string& tok, std::size_t line) {
  if (tok == "+1" || tok == "1" || tok == "+") return 1;
  if (tok == "-1" || tok == "-") return -1;
  parse_error(line, "sign must be +1 or -1, got '" + tok + "'");
}

Party parse_party(const std::string& tok, std::size_t line) {
  if (tok == "A" || tok == "a" || tok == "1") return Party::A;
  if (tok == "B" || tok == "b" || tok == "2") return Party::B;
  parse_error(line, "party must be A or B, got '" + tok + "'");
}

}  // namespace

BellFunctional::BellFunctional(std::string name, std::vector<JointTerm> joint,
                               std::vector<SingleTerm> single, std::size_t outcomes,
                               double lhv_bound)
    : name_(std::move(name)),
      joint_(std::move(joint)),
      single_(std::move(single)),
      outcomes_(outcomes),
      lhv_bound_(lhv_bound) {
  if (outcomes_ < 2 || outcomes_ > 3) throw std::invalid_argument("functional must use 2 or 3 outcomes");
  if (joint_.empty() || single_.empty()) throw std::invalid_argument("functional term tables must be non-empty");
  for (const auto& t : joint_) {
    if (t.i >= kSettings || t.j >= kSettings) throw std::invalid_argument("joint term setting out of range");
    if (t.k >= outcomes_ || t.l >= outcomes_) throw std::invalid_argument("joint term outcome out of range");
    if (t.sign != 1 && t.sign != -1) throw std::invalid_argument("term sign must be +1 or -1");
  }
  for (const auto& t : single_) {
    if (t.i >= kSettings) throw std::invalid_argument("single term setting out of range");
    if (t.k >= outcomes_) throw std::invalid_argument("single term outcome out of range");
    if (t.sign != 1 && t.sign != -1) throw std::invalid_argument("term sign must be +1 or -1");
  }
  if (!std::isfinite(lhv_bound_)) throw std::invalid_argument("LHV bound must be finite");
}

bool BellFunctional::compatible_with(const Scenario& sc) const noexcept {
  return outcomes_ == sc.outcome_count();
}

double BellValue::ratio() const noexcept {
  if (!(joint > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(single) / joint;
}

BellFunctional ch_qutrit_functional() {
  return BellFunctional("ch-qutrit", qutrit_joint(false), qutrit_singles(), 3, 0.0);
}

BellFunctional ch_qutrit_printed_functional() {
  return BellFunctional("ch-qutrit-printed", qutrit_joint(true), qutrit_singles(), 3, 0.0);
}

BellFunctional ch_qubit_functional() {
  // Outcome 1 is "pass". Settings: theta_1 -> 1, theta_1' -> 2 (and likewise for Bob).
  return BellFunctional("ch-qubit",
                        {jt(+1, 1, 1, 1, 1), jt(-1, 1, 2, 1, 1), jt(+1, 2, 1, 1, 1),
                         jt(+1, 2, 2, 1, 1)},
                        {st(-1, Party::A, 2, 1), st(-1, Party::B, 1, 1)}, 2, 0.0);
}

BellFunctional preset(std::string_view name) {
  if (name == "ch-qutrit") return ch_qutrit_functional();
  if (name == "ch-qutrit-printed") return ch_qutrit_printed_functional();
  if (name == "ch-qubit") return ch_qubit_functional();
  throw std::invalid_argument("unknown functional preset '" + std::string(name) + "'");
}

BellFunctional parse_functional(std::string_view text, std::string name,
                                std::size_t default_outcomes) {
  std::vector<JointTerm> joint;
  std::vector<SingleTerm> single;
  std::size_t outcomes = default_outcomes;
  double bound = 0.0;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    const std::string& kw = tok.front();
    if (kw == "joint") {
      if (tok.size() != 6) parse_error(line_no, "joint needs: i j k l sign");
      joint.push_back({parse_index(tok[1], line_no), parse_index(tok[2], line_no),
                       parse_index(tok[3], line_no), parse_index(tok[4], line_no),
                       parse_sign(tok[5], line_no)});
    } else if (kw == "single") {
      if (tok.size() != 5) parse_error(line_no, "single needs: party i k sign");
      single.push_back({parse_party(tok[1], line_no), parse_index(tok[2], line_no),
                        parse_index(tok[3], line_no), parse_sign(tok[4], line_no)});
    } else if (kw == "outcomes") {
      if (tok.size() != 2) parse_error(line_no, "outcomes needs one value");
      outcomes = parse_index(tok[1], line_no) + 1;
    } else if (kw == "bound") {
      if (tok.size() != 2) parse_error(line_no, "bound needs one value");
      try {
        bound = std::stod(tok[1]);
      } catch (const std::exception&) {
        parse_error(line_no, "bound must be a number");
      }
    } else {
      parse_error(line_no, "unknown keyword '" + kw + "'");
    }
  }
  return BellFunctional(std::move(name), std::move(joint), std::move(single), outcomes, bound);
}

BellFunctional load_functional(const std::string& path, std::size_t default_outcomes) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open functional table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_functional(buf.str(), "file:" + path, default_outcomes);
}

std::string format_functional(const BellFunctional& f) {
  std::ostringstream out;
  out << "# " << f.name() << "\n";
  out << "outcomes " << f.outcomes() << "\n";
  out << "bound " << f.lhv_bound() << "\n";
  auto sign = [](int s) { return s > 0 ? "+1" : "-1"; };
  for (const auto& t : f.joint_terms()) {
    out << "joint " << t.i + 1 << ' ' << t.j + 1 << ' ' << t.k + 1 << ' ' << t.l + 1 << ' '
        << sign(t.sign) << "\n";
  }
  for (const auto& t : f.single_terms()) {
    out << "single " << (t.party == Party::A ? 'A' : 'B') << ' ' << t.i + 1 << ' ' << t.k + 1
        << ' ' << sign(t.sign) << "\n";
  }
  return out.str();
}

BellValue evaluate(const BellFunctional& f, const ProbabilityTable& probs) {
  if (probs.outcomes() != f.outcomes()) {
    throw std::invalid_argument("functional " + f.name() + " is incompatible with the probability table");
  }
  BellValue v;
  for (const auto& t : f.joint_terms()) v.joint += t.sign * probs.joint(t.i, t.j, t.k, t.l);
  for (const auto& t : f.single_terms()) v.single += t.sign * probs.single(t.party, t.i, t.k);
  v.total = v.joint + v.single;
  return v;
}

BellValue evaluate(const BellFunctional& f, const Scenario& sc, const qcore::QuantumState& state,
                   const SettingParams& settings) {
  if (!f.compatible_with(sc)) {
    throw std::invalid_argument("functional " + f.name() + " is incompatible with scenario " + sc.name());
  }
  return evaluate(f, ProbabilityTable(sc, state, settings));
}

BellValue at_efficiency(const BellValue& v, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("detection efficiency must lie in [0,1]");
  BellValue out;
  out.joint = eta * eta * v.joint;
  out.single = eta * v.single;
  out.total = out.joint + out.single;
  return out;
}

double value_at_efficiency(const BellValue& v, double eta) { return at_efficiency(v, eta).total; }

double value_at_noise(const BellFunctional& f, const Scenario& sc, const qcore::StateVector& psi,
                      const SettingParams& settings, double noise) {
  return evaluate(f, sc, scenarios::mix_with_noise(psi, noise), settings).total;
}

double lhv_max(const BellFunctional& f) {
  const std::size_t n = f.outcomes();
  double best = -std::numeric_limits<double>::infinity();
  // Strategy: Alice answers (a0, a1) to settings (0, 1), Bob (b0, b1).
  for (std::size_t a0 = 0; a0 < n; ++a0) {
    for (std::size_t a1 = 0; a1 < n; ++a1) {
      for (std::size_t b0 = 0; b0 < n; ++b0) {
        for (std::size_t b1 = 0; b1 < n; ++b1) {
          const std::size_t alice[2] = {a0, a1};
          const std::size_t bob[2] = {b0, b1};
          double value = 0.0;
          for (const auto& t : f.joint_terms()) {
            if (alice[t.i] == t.k && bob[t.j] == t.l) value += t.sign;
          }
          for (const auto& t : f.single_terms()) {
            const std::size_t answer = t.party == Party::A ? alice[t.i] : bob[t.i];
            if (answer == t.k) value += t.sign;
          }
          best = std::max(best, value);
        }
      }
    }
  }
  return best;
}

}  // namespace bellthresh::bell
