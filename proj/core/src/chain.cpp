#include "spinchain/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace spinchain {

namespace {

// 17 significant digits: enough to round-trip any double exactly.
std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ChainSpec make_chain(int n_sites, double coupling, double field) {
  if (n_sites < 1) {
    throw std::invalid_argument("make_chain: n_sites must be >= 1, got " +
                                std::to_string(n_sites));
  }
  if (!std::isfinite(coupling) || coupling <= 0.0) {
    throw std::invalid_argument(
        "make_chain: coupling must be finite and > 0, got " +
        std::to_string(coupling));
  }
  if (!std::isfinite(field)) {
    throw std::invalid_argument("make_chain: field must be finite");
  }
  return ChainSpec{n_sites, coupling, field};
}

ModeTable make_mode_table(const ChainSpec& chain) {
  const int n = chain.n_sites;
  ModeTable table;
  table.wavenumbers.resize(n);
  table.energies.resize(n);
  const double pi = std::acos(-1.0);
  for (int m = 1; m <= n; ++m) {
    const double q = pi * m / (n + 1);
    table.wavenumbers[m - 1] = q;
    table.energies[m - 1] = 2.0 * chain.field - 2.0 * chain.coupling * std::cos(q);
  }
  return table;
}

double norm_squared(const EncodingState& enc) {
  double s = std::norm(enc.vacuum_amplitude);
  for (const auto& a : enc.excitation_amplitudes) s += std::norm(a.value);
  return s;
}

EncodingState make_encoding(int n_sites, Complex vacuum_amplitude,
                            std::vector<SiteAmplitude> amplitudes) {
  if (n_sites < 1) {
    throw std::invalid_argument("make_encoding: n_sites must be >= 1");
  }
  std::sort(amplitudes.begin(), amplitudes.end(),
            [](const SiteAmplitude& a, const SiteAmplitude& b) {
              return a.site < b.site;
            });
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const int site = amplitudes[i].site;
    if (site < 1 || site > n_sites) {
      throw std::invalid_argument("make_encoding: site " +
                                  std::to_string(site) + " out of range 1.." +
                                  std::to_string(n_sites));
    }
    if (i > 0 && amplitudes[i - 1].site == site) {
      throw std::invalid_argument("make_encoding: duplicate site " +
                                  std::to_string(site));
    }
    if (!std::isfinite(amplitudes[i].value.real()) ||
        !std::isfinite(amplitudes[i].value.imag())) {
      throw std::invalid_argument("make_encoding: non-finite amplitude");
    }
  }
  if (!std::isfinite(vacuum_amplitude.real()) ||
      !std::isfinite(vacuum_amplitude.imag())) {
    throw std::invalid_argument("make_encoding: non-finite vacuum amplitude");
  }

  // Zero entries are not part of the support.
  std::erase_if(amplitudes,
                [](const SiteAmplitude& a) { return a.value == Complex{}; });

  EncodingState enc;
  enc.vacuum_amplitude = vacuum_amplitude;
  enc.excitation_amplitudes = std::move(amplitudes);
  enc.region_size = enc.excitation_amplitudes.empty()
                        ? 0
                        : enc.excitation_amplitudes.back().site;

  const double norm = std::sqrt(norm_squared(enc));
  if (std::abs(norm - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "make_encoding: norm " << norm
        << " deviates from 1 by more than 1e-6";
    throw std::invalid_argument(msg.str());
  }
  // Renormalize decimal-entry slack, but leave machine-precision states
  // untouched so serialization round-trips are exact.
  if (std::abs(norm - 1.0) > 1e-14) {
    enc.vacuum_amplitude /= norm;
    for (auto& a : enc.excitation_amplitudes) a.value /= norm;
  }
  return enc;
}

std::string encoding_to_json(const EncodingState& enc, int n_sites) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"n\": " << n_sites << ",\n";
  out << "  \"alpha0\": [" << format_double(enc.vacuum_amplitude.real())
      << ", " << format_double(enc.vacuum_amplitude.imag()) << "],\n";
  out << "  \"amps\": [";
  for (std::size_t i = 0; i < enc.excitation_amplitudes.size(); ++i) {
    const auto& a = enc.excitation_amplitudes[i];
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\"site\": " << a.site << ", \"re\": "
        << format_double(a.value.real()) << ", \"im\": "
        << format_double(a.value.imag()) << "}";
  }
  if (!enc.excitation_amplitudes.empty()) out << "\n  ";
  out << "]\n}\n";
  return out.str();
}

std::pair<EncodingState, int> encoding_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("encoding_from_json: ") +
                                e.what());
  }
  try {
    const int n = doc.at("n").get<int>();
    const auto& a0 = doc.at("alpha0");
    const Complex vacuum{a0.at(0).get<double>(), a0.at(1).get<double>()};
    std::vector<SiteAmplitude> amps;
    for (const auto& item : doc.at("amps")) {
      amps.push_back(SiteAmplitude{
          item.at("site").get<int>(),
          Complex{item.at("re").get<double>(), item.at("im").get<double>()}});
    }
    return {make_encoding(n, vacuum, std::move(amps)), n};
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("encoding_from_json: ") +
                                e.what());
  }
}

}  // namespace spinchain
