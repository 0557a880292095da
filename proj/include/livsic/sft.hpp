#ifndef LIVSIC_SFT_HPP
#define LIVSIC_SFT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "livsic/base_common.hpp"
#include "livsic/errors.hpp"

namespace livsic {

/// Two-sided sequence with eventually periodic tails, stored exactly.
/// The underlying sequence is fixed; shifting only moves the origin, so
/// iteration is O(1) and lossless.
struct SymbolicPoint {
    std::vector<std::uint8_t> left_period;   // tiles (-inf, cb), anchored at cb
    std::vector<std::uint8_t> center;        // absolute indices [cb, cb + size)
    std::vector<std::uint8_t> right_period;  // tiles [cb + size, +inf)
    long cb = 0;      // absolute start of center
    long origin = 0;  // symbol i of the point is underlying(i + origin)

    static SymbolicPoint periodic(std::vector<std::uint8_t> word) {
        SymbolicPoint p;
        p.left_period = word;
        p.right_period = std::move(word);
        return p;
    }

    static SymbolicPoint from_parts(std::vector<std::uint8_t> lp,
                                    std::vector<std::uint8_t> c, long c_begin,
                                    std::vector<std::uint8_t> rp) {
        SymbolicPoint p;
        p.left_period = std::move(lp);
        p.center = std::move(c);
        p.right_period = std::move(rp);
        p.cb = c_begin;
        return p;
    }

    int at(long i) const { return underlying(i + origin); }

    int underlying(long j) const {
        long ce = cb + long(center.size());
        if (j >= cb && j < ce) return center[std::size_t(j - cb)];
        if (j < cb) return left_period[mod(j - cb, long(left_period.size()))];
        return right_period[mod(j - ce, long(right_period.size()))];
    }

    SymbolicPoint shifted(long n) const {
        SymbolicPoint p = *this;
        p.origin += n;
        return p;
    }

    /// Index ranges (relative to the origin) outside of which the point is
    /// purely periodic to the left/right.
    long periodic_from_right() const {
        return std::max(cb + long(center.size()) - origin, 0L);
    }
    long periodic_from_left() const { return std::min(cb - origin, 0L); }

    static long mod(long a, long m) {
        long r = a % m;
        return r < 0 ? r + m : r;
    }

    std::string word(long lo, long hi) const {  // symbols at indices [lo, hi)
        std::string s;
        for (long i = lo; i < hi; ++i) s.push_back(char('0' + at(i)));
        return s;
    }
};

inline bool points_equal(const SymbolicPoint& x, const SymbolicPoint& y) {
    long rx = x.periodic_from_right(), ry = y.periodic_from_right();
    long lx = x.periodic_from_left(), ly = y.periodic_from_left();
    long pr = std::lcm(long(x.right_period.size()), long(y.right_period.size()));
    long pl = std::lcm(long(x.left_period.size()), long(y.left_period.size()));
    long hi = std::max(rx, ry) + pr;
    long lo = std::min(lx, ly) - pl;
    for (long i = lo; i < hi; ++i)
        if (x.at(i) != y.at(i)) return false;
    return true;
}

/// Two-sided subshift of finite type on a finite alphabet.
class Sft {
public:
    using Point = SymbolicPoint;
    using Orbit = PeriodicOrbit<SymbolicPoint>;

    Sft(Eigen::MatrixXi adjacency, double metric_base = 0.5,
        double closing_radius = -1.0)
        : adj_(std::move(adjacency)), base_(metric_base) {
        n_ = int(adj_.rows());
        if (adj_.cols() != n_ || n_ < 1)
            throw ConfigError("sft: adjacency must be square");
        if (!(base_ > 0.0 && base_ < 1.0))
            throw ConfigError("sft: metric_base must lie in (0,1)");
        for (int i = 0; i < n_; ++i) {
            if (adj_.row(i).sum() == 0 || adj_.col(i).sum() == 0)
                throw ConfigError("sft: symbol " + std::to_string(i) +
                                  " lacks an outgoing or incoming edge");
        }
        mixing_time_ = compute_mixing_time();
        closing_radius_ = closing_radius > 0.0 ? closing_radius : base_;
    }

    int alphabet_size() const { return n_; }
    const Eigen::MatrixXi& adjacency() const { return adj_; }
    double metric_base() const { return base_; }
    double product_structure_radius() const { return base_; }
    double closing_radius() const { return closing_radius_; }
    bool mixing() const { return mixing_time_ > 0; }
    int mixing_time() const { return mixing_time_; }

    /// tau for the shadowing profile: one shift step contracts the metric
    /// by metric_base on the appropriate side.
    double expansion_rate() const { return -std::log(base_); }

    bool admissible(int a, int b) const { return adj_(a, b) != 0; }

    bool admissible_word(const std::vector<std::uint8_t>& w) const {
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
            if (!admissible(w[i], w[i + 1])) return false;
        for (auto s : w)
            if (s >= n_) return false;
        return !w.empty();
    }

    bool valid_point(const SymbolicPoint& p) const {
        long lo = p.periodic_from_left() - long(p.left_period.size()) - 1;
        long hi = p.periodic_from_right() + long(p.right_period.size()) + 1;
        for (long i = lo; i < hi; ++i)
            if (p.at(i) >= n_ || !admissible(p.at(i), p.at(i + 1))) return false;
        return true;
    }

    SymbolicPoint iterate(const SymbolicPoint& x, long n) const {
        return x.shifted(n);
    }

    double distance(const SymbolicPoint& x, const SymbolicPoint& y) const {
        if (points_equal(x, y)) return 0.0;
        long horizon = scan_horizon(x, y);
        for (long k = 0; k <= horizon; ++k) {
            if (x.at(k) != y.at(k) || x.at(-k) != y.at(-k))
                return std::pow(base_, double(k));
        }
        return 0.0;  // unreachable: points_equal scans at least this far
    }

    /// [y,z]: future coordinates (i >= 0) from y, past (i < 0) from z.
    SymbolicPoint bracket(const SymbolicPoint& y, const SymbolicPoint& z) const {
        if (distance(y, z) >= product_structure_radius())
            throw TooFarApart("bracket: symbolic points differ at index 0");
        if (!admissible(z.at(-1), y.at(0)))
            throw InadmissibleSplice("bracket: junction not admissible");
        long lo = std::min(z.periodic_from_left(), 0L);
        long hi = std::max(y.periodic_from_right(), 0L);
        std::vector<std::uint8_t> c;
        for (long i = lo; i < hi; ++i)
            c.push_back(std::uint8_t(i < 0 ? z.at(i) : y.at(i)));
        std::vector<std::uint8_t> lp(z.left_period.size());
        for (std::size_t m = 0; m < lp.size(); ++m)
            lp[m] = std::uint8_t(z.at(lo - long(lp.size()) + long(m)));
        std::vector<std::uint8_t> rp(y.right_period.size());
        for (std::size_t m = 0; m < rp.size(); ++m)
            rp[m] = std::uint8_t(y.at(hi + long(m)));
        return SymbolicPoint::from_parts(std::move(lp), std::move(c), lo, std::move(rp));
    }

    /// Word-repetition closing: if the first n symbols wrap admissibly,
    /// their periodic repetition shadows the near-return segment.
    ClosingResult<SymbolicPoint> close_orbit(const SymbolicPoint& x, int n) const {
        SymbolicPoint fx = x.shifted(n);
        double delta = distance(x, fx);
        if (delta >= closing_radius_)
            throw NotCloseEnough("close_orbit: symbolic return distance " +
                                 std::to_string(delta));
        std::vector<std::uint8_t> w;
        for (int i = 0; i < n; ++i) w.push_back(std::uint8_t(x.at(i)));
        if (!admissible(w.back(), w.front()))
            throw SingularClosing("close_orbit: wrap not admissible");
        SymbolicPoint p = SymbolicPoint::periodic(w);

        ClosingResult<SymbolicPoint> res;
        res.delta = delta;
        res.orbit = as_orbit(p, n);
        double tau = expansion_rate();
        double c = 0.0;
        for (int i = 0; i <= n; ++i) {
            double di = distance(p.shifted(i), x.shifted(i));
            double bound = delta * std::exp(-tau * std::min(i, n - i));
            if (bound > 0.0) c = std::max(c, di / bound);
        }
        res.c_shadow = delta == 0.0 ? 0.0 : c;
        return res;
    }

    /// All orbits of minimal period exactly n: cycles of length n in the
    /// transition graph, deduplicated by minimal rotation.
    std::vector<Orbit> enumerate_periodic(int n, int period_max = 24) const {
        if (n < 1 || n > period_max)
            throw PeriodBudgetExceeded("enumerate_periodic: period " + std::to_string(n));
        std::vector<Orbit> orbits;
        std::vector<std::uint8_t> w;
        enumerate_words(n, w, orbits);
        std::sort(orbits.begin(), orbits.end(), [](const Orbit& a, const Orbit& b) {
            return a.points[0].word(0, a.period) < b.points[0].word(0, b.period);
        });
        return orbits;
    }

    std::int64_t cycle_point_count(int n) const {
        Eigen::MatrixXi p = Eigen::MatrixXi::Identity(n_, n_);
        for (int i = 0; i < n; ++i) p = p * adj_;
        return p.trace();
    }

    /// Specification-property gluing: connect the segments in order with
    /// connector words of length exactly N, then close up periodically.
    Orbit glue_specification(const std::vector<std::vector<std::uint8_t>>& segments,
                             int gap) const {
        if (!mixing()) throw NotMixing("glue_specification requires a mixing SFT");
        if (gap < mixing_time_)
            throw NoConnector("glue_specification: gap below mixing time");
        if (segments.empty()) throw ConfigError("glue_specification: no segments");
        for (const auto& s : segments)
            if (!admissible_word(s))
                throw InadmissibleWord("glue_specification: inadmissible segment");

        std::vector<std::uint8_t> w;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const auto& seg = segments[i];
            const auto& next = segments[(i + 1) % segments.size()];
            w.insert(w.end(), seg.begin(), seg.end());
            auto conn = connector(seg.back(), next.front(), gap);
            w.insert(w.end(), conn.begin(), conn.end());
        }
        return as_orbit(SymbolicPoint::periodic(w), int(w.size()));
    }

    /// Connector word c_1..c_N with a -> c_1 -> ... -> c_N -> b admissible;
    /// lexicographically smallest, found by DP over path existence.
    std::vector<std::uint8_t> connector(int a, int b, int len) const {
        // reach[k](s) = path of length k edges exists from s to b
        std::vector<std::vector<char>> reach(std::size_t(len) + 2,
                                             std::vector<char>(std::size_t(n_), 0));
        reach[0][std::size_t(b)] = 1;
        for (int k = 1; k <= len + 1; ++k)
            for (int s = 0; s < n_; ++s)
                for (int t = 0; t < n_; ++t)
                    if (admissible(s, t) && reach[std::size_t(k) - 1][std::size_t(t)])
                        reach[std::size_t(k)][std::size_t(s)] = 1;
        if (!reach[std::size_t(len) + 1][std::size_t(a)])
            throw NoConnector("connector: no admissible path");
        std::vector<std::uint8_t> c;
        int cur = a;
        for (int k = len; k >= 1; --k) {
            int pick = -1;
            for (int t = 0; t < n_; ++t)
                if (admissible(cur, t) && reach[std::size_t(k)][std::size_t(t)]) { pick = t; break; }
            c.push_back(std::uint8_t(pick));
            cur = pick;
        }
        if (!admissible(cur, b)) throw NoConnector("connector: reconstruction failed");
        return c;
    }

    /// A periodic point whose forward orbit visits every admissible word of
    /// the given length: the covering walk is built greedily with shortest
    /// admissible bridges.  Used to generate provably dense orbits.
    SymbolicPoint cover_point(int word_len) const {
        if (!mixing()) throw NotMixing("cover_point requires a mixing SFT");
        std::vector<std::vector<std::uint8_t>> words = all_words(word_len);
        std::set<std::string> todo;
        for (const auto& w : words) todo.insert(std::string(w.begin(), w.end()));

        std::vector<std::uint8_t> walk = words.front();
        todo.erase(std::string(walk.begin(), walk.end()));
        while (!todo.empty()) {
            // Greedy: try extending by one symbol that completes an uncovered word.
            bool extended = false;
            for (int s = 0; s < n_ && !extended; ++s) {
                if (!admissible(walk.back(), s)) continue;
                std::vector<std::uint8_t> cand(walk.end() - (word_len - 1), walk.end());
                cand.push_back(std::uint8_t(s));
                std::string key(cand.begin(), cand.end());
                if (todo.count(key)) {
                    walk.push_back(std::uint8_t(s));
                    todo.erase(key);
                    extended = true;
                }
            }
            if (extended) continue;
            // Bridge to the lexicographically first uncovered word.
            std::string target = *todo.begin();
            auto bridge = shortest_bridge(walk.back(), std::uint8_t(target[0]));
            walk.insert(walk.end(), bridge.begin(), bridge.end());
            for (char ch : target) walk.push_back(std::uint8_t(ch));
            todo.erase(target);
            // Remove any other words newly covered by the appended stretch.
            for (long i = std::max(0L, long(walk.size()) - long(target.size()) -
                                           long(bridge.size()) - word_len);
                 i + word_len <= long(walk.size()); ++i) {
                todo.erase(std::string(walk.begin() + i, walk.begin() + i + word_len));
            }
        }
        // Close the walk into a periodic word.
        auto closing = connector(walk.back(), walk.front(), mixing_time_);
        walk.insert(walk.end(), closing.begin(), closing.end());
        return SymbolicPoint::periodic(walk);
    }

    bool returns_to(const SymbolicPoint& p, const SymbolicPoint& q) const {
        return points_equal(p, q);
    }

    Orbit as_orbit(const SymbolicPoint& p, int n) const {
        int m = n;
        for (int d = 1; d < n; ++d) {
            if (n % d != 0) continue;
            if (points_equal(p.shifted(d), p)) { m = d; break; }
        }
        Orbit orb;
        for (int i = 0; i < m; ++i) orb.points.push_back(p.shifted(i));
        orb.period = m;
        return orb;
    }

    std::vector<std::vector<std::uint8_t>> all_words(int len) const {
        std::vector<std::vector<std::uint8_t>> out;
        std::vector<std::uint8_t> w;
        words_rec(len, w, out);
        return out;
    }

private:
    void words_rec(int len, std::vector<std::uint8_t>& w,
                   std::vector<std::vector<std::uint8_t>>& out) const {
        if (int(w.size()) == len) { out.push_back(w); return; }
        for (int s = 0; s < n_; ++s) {
            if (!w.empty() && !admissible(w.back(), s)) continue;
            w.push_back(std::uint8_t(s));
            words_rec(len, w, out);
            w.pop_back();
        }
    }

    void enumerate_words(int n, std::vector<std::uint8_t>& w,
                         std::vector<Orbit>& orbits) const {
        if (int(w.size()) == n) {
            if (!admissible(w.back(), w.front())) return;
            if (!is_minimal_rotation(w)) return;
            if (minimal_word_period(w) != n) return;
            orbits.push_back(as_orbit(SymbolicPoint::periodic(w), n));
            return;
        }
        for (int s = 0; s < n_; ++s) {
            if (!w.empty() && !admissible(w.back(), s)) continue;
            w.push_back(std::uint8_t(s));
            enumerate_words(n, w, orbits);
            w.pop_back();
        }
    }

    static bool is_minimal_rotation(const std::vector<std::uint8_t>& w) {
        std::size_t n = w.size();
        for (std::size_t r = 1; r < n; ++r) {
            for (std::size_t i = 0; i < n; ++i) {
                int diff = int(w[(i + r) % n]) - int(w[i]);
                if (diff < 0) return false;
                if (diff > 0) break;
            }
        }
        return true;
    }

    static int minimal_word_period(const std::vector<std::uint8_t>& w) {
        int n = int(w.size());
        for (int d = 1; d < n; ++d) {
            if (n % d != 0) continue;
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) ok = w[std::size_t(i)] == w[std::size_t((i + d) % n)];
            if (ok) return d;
        }
        return n;
    }

    std::vector<std::uint8_t> shortest_bridge(int a, int b) const {
        // BFS over symbols: shortest u with a -> u_1 -> ... -> u_k -> b.
        for (int len = 0; len <= 2 * n_ + mixing_time_; ++len) {
            try {
                return connector(a, b, len);
            } catch (const NoConnector&) {}
        }
        throw NoConnector("shortest_bridge: unreachable symbol");
    }

    long scan_horizon(const SymbolicPoint& x, const SymbolicPoint& y) const {
        long pr = std::lcm(long(x.right_period.size()), long(y.right_period.size()));
        long pl = std::lcm(long(x.left_period.size()), long(y.left_period.size()));
        long hi = std::max({x.periodic_from_right(), y.periodic_from_right(), 0L}) + pr;
        long lo = -std::min({x.periodic_from_left(), y.periodic_from_left(), 0L}) + pl;
        return std::max(hi, lo) + 1;
    }

    int compute_mixing_time() const {
        Eigen::MatrixXi p = Eigen::MatrixXi::Identity(n_, n_);
        for (int k = 1; k <= 4 * n_ * n_ + 8; ++k) {
            p = p * adj_;
            p = p.cwiseMin(1);  // keep entries bounded; only positivity matters
            if ((p.array() > 0).all()) return k;
        }
        return 0;  // not mixing
    }

    Eigen::MatrixXi adj_;
    int n_ = 0;
    double base_;
    double closing_radius_;
    int mixing_time_ = 0;
};

} // namespace livsic

#endif
