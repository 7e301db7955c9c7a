#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fkpp/errors.hpp"

namespace fkpp {

/// Open interval ]a,b[.
struct Interval {
    double a = 0.0;
    double b = 1.0;

    Interval() = default;
    Interval(double a_, double b_) : a(a_), b(b_) {
        require(a < b, "Interval requires a < b");
    }

    double length() const { return b - a; }
    bool contains(double x) const { return a < x && x < b; }
};

enum class Tag { Minus, Plus };

/// Finite union of disjoint open intervals, sorted by left endpoint,
/// with an optional Minus/Plus classification per interval.
/// Immutable after construction; touching endpoints merge on construction.
class Domain1D {
  public:
    Domain1D() = default;

    const std::vector<Interval>& intervals() const { return intervals_; }
    const std::optional<std::vector<Tag>>& tags() const { return tags_; }
    bool classified() const { return tags_.has_value(); }

    std::size_t size() const { return intervals_.size(); }
    bool empty() const { return intervals_.empty(); }

    /// Convex hull endpoints (requires non-empty domain).
    double left() const { return intervals_.front().a; }
    double right() const { return intervals_.back().b; }
    double diameter() const { return right() - left(); }

    double measure() const {
        double m = 0.0;
        for (const auto& iv : intervals_) m += iv.length();
        return m;
    }

    bool contains(double x) const {
        for (const auto& iv : intervals_)
            if (iv.contains(x)) return true;
        return false;
    }

    friend Domain1D make_domain(std::vector<std::pair<double, double>> spec,
                                std::optional<std::vector<Tag>> tags);

  private:
    std::vector<Interval> intervals_;
    std::optional<std::vector<Tag>> tags_;
};

/// Builds a sorted disjoint domain; intervals sharing an endpoint are merged
/// into one interval (a merged interval keeps a single tag only when both
/// parts agree). Interior overlap is an error.
inline Domain1D make_domain(std::vector<std::pair<double, double>> spec,
                            std::optional<std::vector<Tag>> tags = std::nullopt) {
    if (tags) require(tags->size() == spec.size(), "one tag per interval");
    std::vector<std::size_t> order(spec.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return spec[i].first < spec[j].first; });

    Domain1D d;
    for (std::size_t k : order) {
        auto [a, b] = spec[k];
        if (!(a < b)) throw PreconditionError("interval endpoints must satisfy a < b");
        if (!d.intervals_.empty()) {
            Interval& last = d.intervals_.back();
            if (a < last.b) throw OverlappingIntervals("interval interiors intersect");
            if (a == last.b) {  // touching endpoints merge
                last.b = b;
                if (d.tags_ && (*d.tags_).back() != (*tags)[k])
                    throw PreconditionError("touching intervals with conflicting tags");
                continue;
            }
        }
        d.intervals_.emplace_back(a, b);
        if (tags) {
            if (!d.tags_) d.tags_.emplace();
            d.tags_->push_back((*tags)[k]);
        }
    }
    return d;
}

/// Two-patch family: ]-A1-mu, -mu[ u ]mu, A2+mu[ with dist = 2*mu.
struct TwoPatch {
    double A1 = 1.0;
    double A2 = 1.0;
    double mu = 0.0;

    TwoPatch(double A1_, double A2_, double mu_) : A1(A1_), A2(A2_), mu(mu_) {
        require(A1 > 0 && A2 > 0, "patch lengths must be positive");
        require(mu >= 0, "mu must be nonnegative");
    }
};

/// mu > 0: the two patches; mu = 0: the single merged interval ]-A1, A2[.
inline Domain1D two_patch(const TwoPatch& tp) {
    return make_domain({{-tp.A1 - tp.mu, -tp.mu}, {tp.mu, tp.A2 + tp.mu}});
}

/// delta(x) = dist(x, boundary) inside the domain, 0 outside and on the boundary.
inline double delta(const Domain1D& d, double x) {
    for (const auto& iv : d.intervals())
        if (iv.contains(x)) return std::min(x - iv.a, iv.b - x);
    return 0.0;
}

inline Domain1D scale(const Domain1D& d, double s) {
    require(s > 0, "scale factor must be positive");
    std::vector<std::pair<double, double>> spec;
    spec.reserve(d.size());
    for (const auto& iv : d.intervals()) spec.emplace_back(s * iv.a, s * iv.b);
    return make_domain(std::move(spec), d.tags());
}

inline Domain1D translate(const Domain1D& d, double t) {
    std::vector<std::pair<double, double>> spec;
    spec.reserve(d.size());
    for (const auto& iv : d.intervals()) spec.emplace_back(iv.a + t, iv.b + t);
    return make_domain(std::move(spec), d.tags());
}

/// Partition into (minus, plus) by classification. The Minus part must be
/// nonempty; the Plus part may be empty.
inline std::pair<Domain1D, Domain1D> split(const Domain1D& d) {
    if (!d.classified()) throw MissingClassification("domain has no Minus/Plus tags");
    std::vector<std::pair<double, double>> minus, plus;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& iv = d.intervals()[i];
        ((*d.tags())[i] == Tag::Minus ? minus : plus).emplace_back(iv.a, iv.b);
    }
    if (minus.empty()) throw EmptyMinus("classification has no Minus interval");
    return {make_domain(std::move(minus)), make_domain(std::move(plus))};
}

/// Geometric diagnostics for judging the far-cluster hypotheses; purely
/// descriptive, nothing is certified.
struct DomainDiagnostics {
    double min_plus_minus_gap = std::numeric_limits<double>::infinity();
    double min_plus_plus_gap = std::numeric_limits<double>::infinity();
    double max_plus_length = 0.0;
    double interior_ball_radius = std::numeric_limits<double>::infinity();
};

inline DomainDiagnostics diagnostics(const Domain1D& d) {
    DomainDiagnostics out;
    for (const auto& iv : d.intervals())
        out.interior_ball_radius = std::min(out.interior_ball_radius, iv.length() / 2);
    if (!d.classified()) return out;
    auto [minus, plus] = split(d);
    auto gap = [](const Interval& p, const Interval& q) {
        if (p.b <= q.a) return q.a - p.b;
        if (q.b <= p.a) return p.a - q.b;
        return 0.0;
    };
    for (const auto& p : plus.intervals()) {
        out.max_plus_length = std::max(out.max_plus_length, p.length());
        for (const auto& m : minus.intervals())
            out.min_plus_minus_gap = std::min(out.min_plus_minus_gap, gap(p, m));
    }
    for (std::size_t i = 0; i + 1 < plus.size(); ++i)
        out.min_plus_plus_gap = std::min(out.min_plus_plus_gap,
                                         gap(plus.intervals()[i], plus.intervals()[i + 1]));
    return out;
}

// JSON form: {"intervals": [[a,b],...], "tags": ["minus"|"plus",...]}
inline void to_json(nlohmann::json& j, const Domain1D& d) {
    j = nlohmann::json::object();
    auto arr = nlohmann::json::array();
    for (const auto& iv : d.intervals()) arr.push_back({iv.a, iv.b});
    j["intervals"] = std::move(arr);
    if (d.classified()) {
        auto tags = nlohmann::json::array();
        for (Tag t : *d.tags()) tags.push_back(t == Tag::Minus ? "minus" : "plus");
        j["tags"] = std::move(tags);
    }
}

inline void from_json(const nlohmann::json& j, Domain1D& d) {
    std::vector<std::pair<double, double>> spec;
    for (const auto& iv : j.at("intervals"))
        spec.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
    std::optional<std::vector<Tag>> tags;
    if (j.contains("tags")) {
        tags.emplace();
        for (const auto& t : j.at("tags")) {
            const auto s = t.get<std::string>();
            if (s == "minus")
                tags->push_back(Tag::Minus);
            else if (s == "plus")
                tags->push_back(Tag::Plus);
            else
                throw ConfigError("tag must be \"minus\" or \"plus\", got " + s);
        }
    }
    d = make_domain(std::move(spec), std::move(tags));
}

}  // namespace fkpp
