#include "fiberrates/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fiberrates/rng.hpp"
#include "json.hpp"

namespace fiber {

namespace {

std::uint32_t gray_code(std::uint32_t n) { return n ^ (n >> 1); }

}  // namespace

Pmf uniform_pmf(std::size_t size) {
    return Pmf(size, 1.0 / static_cast<double>(size));
}

double Constellation::average_energy() const {
    double e = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) e += pmf[k] * std::norm(points[k]);
    return e;
}

bool Constellation::has_uniform_pmf() const {
    const double u = 1.0 / static_cast<double>(points.size());
    return std::all_of(pmf.begin(), pmf.end(), [u](double p) { return p == u; });
}

double Constellation::entropy_bits() const {
    double h = 0.0;
    for (double p : pmf)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

void Constellation::renormalize_energy() {
    const double e = average_energy();
    if (e <= 0.0) throw std::runtime_error("constellation has zero average energy");
    const double s = 1.0 / std::sqrt(e);
    for (auto& p : points) p *= s;
}

void Constellation::set_pmf(Pmf new_pmf) {
    if (new_pmf.size() != points.size())
        throw std::invalid_argument("pmf size does not match constellation");
    pmf = std::move(new_pmf);
    renormalize_energy();
}

std::string Constellation::label_string(std::size_t k) const {
    std::string s(static_cast<std::size_t>(bits_per_symbol), '0');
    for (int b = 0; b < bits_per_symbol; ++b)
        if (labels[k] >> (bits_per_symbol - 1 - b) & 1u) s[static_cast<std::size_t>(b)] = '1';
    return s;
}

Constellation build_qam(int m) { return build_qam(m, uniform_pmf(1u << m)); }

Constellation build_qam(int m, const Pmf& pmf) {
    if (m < 2 || m % 2 != 0)
        throw std::invalid_argument("unsupported format: QAM order m must be even and >= 2");
    const std::uint32_t half = static_cast<std::uint32_t>(m) / 2;
    const std::uint32_t levels = 1u << half;  // per-dimension levels
    const std::size_t M = std::size_t{1} << m;
    if (pmf.size() != M) throw std::invalid_argument("pmf size does not match 2^m");

    Constellation c;
    c.bits_per_symbol = m;
    c.points.reserve(M);
    c.labels.reserve(M);
    for (std::uint32_t qi = 0; qi < levels; ++qi) {
        const double qlvl = 2.0 * qi - (levels - 1.0);
        for (std::uint32_t ii = 0; ii < levels; ++ii) {
            const double ilvl = 2.0 * ii - (levels - 1.0);
            c.points.emplace_back(ilvl, qlvl);
            // first m/2 bits label I, last m/2 label Q
            c.labels.push_back((gray_code(ii) << half) | gray_code(qi));
        }
    }
    c.pmf = pmf;
    c.renormalize_energy();
    return c;
}

Pmf maxwell_boltzmann_pmf(const Constellation& c, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    Pmf p(c.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        p[k] = std::exp(-lambda * std::norm(c.points[k]));
        sum += p[k];
    }
    for (auto& v : p) v /= sum;
    return p;
}

std::size_t hard_decision(cplx y, const Constellation& c) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double d = std::norm(y - c.points[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

std::vector<std::uint32_t> symbols_from_bits(const std::vector<std::uint8_t>& bits,
                                             const Constellation& c) {
    const int m = c.bits_per_symbol;
    if (bits.size() % static_cast<std::size_t>(m) != 0)
        throw std::invalid_argument("bit count is not a multiple of m");
    // label -> index table
    std::vector<std::uint32_t> index_of(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) index_of[c.labels[k]] = static_cast<std::uint32_t>(k);

    std::vector<std::uint32_t> out;
    out.reserve(bits.size() / static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < bits.size(); i += static_cast<std::size_t>(m)) {
        std::uint32_t label = 0;
        for (int b = 0; b < m; ++b) label = (label << 1) | (bits[i + static_cast<std::size_t>(b)] & 1u);
        out.push_back(index_of[label]);
    }
    return out;
}

std::vector<std::uint32_t> symbols_from_pmf(const Pmf& pmf, std::size_t n,
                                            std::mt19937_64& rng) {
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        acc += pmf[k];
        cdf[k] = acc;
    }
    cdf.back() = 1.0;

    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform_double(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        out[i] = static_cast<std::uint32_t>(it - cdf.begin());
    }
    return out;
}

std::string Constellation::to_json() const {
    nlohmann::json j;
    j["m"] = bits_per_symbol;
    auto& pts = j["points"];
    for (const auto& p : points) pts.push_back({p.real(), p.imag()});
    auto& labs = j["labels"];
    for (std::size_t k = 0; k < size(); ++k) labs.push_back(label_string(k));
    j["pmf"] = pmf;
    return j.dump();
}

Constellation Constellation::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Constellation c;
    c.bits_per_symbol = j.at("m").get<int>();
    for (const auto& p : j.at("points"))
        c.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    for (const auto& s : j.at("labels")) {
        std::uint32_t v = 0;
        for (char ch : s.get<std::string>()) v = (v << 1) | (ch == '1' ? 1u : 0u);
        c.labels.push_back(v);
    }
    c.pmf = j.at("pmf").get<Pmf>();
    if (c.points.size() != (std::size_t{1} << c.bits_per_symbol) ||
        c.labels.size() != c.points.size() || c.pmf.size() != c.points.size())
        throw std::invalid_argument("inconsistent constellation JSON");
    return c;
}

}  // namespace fiber
