#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "warmstart/errors.hpp"

namespace warmstart {

enum class MethodKind { Last, Classic, RollingQR, Extrap, SparseExtrap };

/// A guess method in the LAST / CLASSIC(M) / QR(M) / EXTRAP(m, M) /
/// SPEXTRAP(m, M) nomenclature. EXTRAP(M-1, M) is naive Lagrange
/// extrapolation.
struct MethodSpec {
  MethodKind kind = MethodKind::Last;
  int M = 1;
  int m = 0;

  static MethodSpec last() { return {MethodKind::Last, 1, 0}; }
  static MethodSpec classic(int M) { return {MethodKind::Classic, M, 0}; }
  static MethodSpec rolling_qr(int M) { return {MethodKind::RollingQR, M, 0}; }
  static MethodSpec extrap(int m, int M) { return {MethodKind::Extrap, M, m}; }
  static MethodSpec sparse_extrap(int m, int M) {
    return {MethodKind::SparseExtrap, M, m};
  }

  [[nodiscard]] bool is_projection() const {
    return kind == MethodKind::Classic || kind == MethodKind::RollingQR;
  }
  [[nodiscard]] bool is_extrapolation() const {
    return kind == MethodKind::Extrap || kind == MethodKind::SparseExtrap;
  }

  void validate() const {
    if (kind == MethodKind::Last)
      return;
    if (M < 1)
      throw ParameterError(label() + ": history size must be >= 1");
    if (is_extrapolation() && (m < 0 || m + 1 > M))
      throw ParameterError(label() + ": need 0 <= m <= M - 1");
  }

  [[nodiscard]] std::string label() const {
    const auto Ms = std::to_string(M);
    const auto ms = std::to_string(m);
    switch (kind) {
    case MethodKind::Last:
      return "LAST";
    case MethodKind::Classic:
      return "CLASSIC(" + Ms + ")";
    case MethodKind::RollingQR:
      return "QR(" + Ms + ")";
    case MethodKind::Extrap:
      return "EXTRAP(" + ms + "," + Ms + ")";
    case MethodKind::SparseExtrap:
      return "SPEXTRAP(" + ms + "," + Ms + ")";
    }
    return "?";
  }

  /// Parses e.g. "LAST", "qr(8)", "EXTRAP(2, 8)". Throws ParameterError.
  static MethodSpec parse(std::string_view text) {
    std::string s;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c)))
        s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto open = s.find('(');
    const std::string name = s.substr(0, open);
    std::string args;
    if (open != std::string::npos) {
      if (s.back() != ')')
        throw ParameterError("method '" + std::string(text) +
                             "': missing ')'");
      args = s.substr(open + 1, s.size() - open - 2);
    }
    auto to_int = [&](const std::string &v) {
      std::size_t used = 0;
      int out = 0;
      try {
        out = std::stoi(v, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used == 0 || used != v.size())
        throw ParameterError("method '" + std::string(text) +
                             "': bad integer '" + v + "'");
      return out;
    };
    MethodSpec spec;
    if (name == "LAST") {
      if (!args.empty())
        throw ParameterError("LAST takes no arguments");
      spec = last();
    } else if (name == "CLASSIC" || name == "QR") {
      if (args.empty() || args.find(',') != std::string::npos)
        throw ParameterError(name + " takes one argument (M)");
      spec = name == "QR" ? rolling_qr(to_int(args)) : classic(to_int(args));
    } else if (name == "EXTRAP" || name == "SPEXTRAP") {
      const auto comma = args.find(',');
      if (comma == std::string::npos)
        throw ParameterError(name + " takes two arguments (m, M)");
      const int m = to_int(args.substr(0, comma));
      const int M = to_int(args.substr(comma + 1));
      spec = name == "EXTRAP" ? extrap(m, M) : sparse_extrap(m, M);
    } else {
      throw ParameterError("unknown method '" + std::string(text) + "'");
    }
    spec.validate();
    return spec;
  }

  friend bool operator==(const MethodSpec &, const MethodSpec &) = default;
};

} // namespace warmstart
