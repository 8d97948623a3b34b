#include "striptsp/geometry.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace striptsp {

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

StripInstance::StripInstance(std::vector<Point> points, double delta)
    : points_(std::move(points)), delta_(delta) {
    if (!(delta_ > 0.0) || !std::isfinite(delta_))
        throw DomainError("strip width must be positive and finite");
    for (const Point& p : points_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw DomainError("non-finite coordinate");
        if (p.y < 0.0 || p.y > delta_)
            throw DomainError("point y=" + std::to_string(p.y) +
                              " outside strip [0, delta]");
    }
    std::sort(points_.begin(), points_.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
}

const Point& StripInstance::at(std::size_t i) const {
    if (i >= points_.size())
        throw IndexError("point index " + std::to_string(i) + " out of range");
    return points_[i];
}

double StripInstance::dist(std::size_t i, std::size_t j) const {
    return distance(points_[i], points_[j]);
}

bool StripInstance::distinct_x() const {
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (!(points_[i - 1].x < points_[i].x)) return false;
    return true;
}

Tour::Tour(std::vector<int> order) : order_(std::move(order)) {
    const std::size_t n = order_.size();
    if (n == 0) return;
    auto zero = std::find(order_.begin(), order_.end(), 0);
    if (zero != order_.end()) std::rotate(order_.begin(), zero, order_.end());
    if (n >= 3 && order_[1] > order_.back())
        std::reverse(order_.begin() + 1, order_.end());
}

EdgeSet Tour::edges() const {
    EdgeSet out;
    const std::size_t n = order_.size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({order_[i], order_[(i + 1) % n]});
    return out;
}

void check_permutation(std::span<const int> order, std::size_t n) {
    if (order.size() != n)
        throw IndexError("tour visits " + std::to_string(order.size()) +
                         " points, instance has " + std::to_string(n));
    std::vector<char> seen(n, 0);
    for (int v : order) {
        if (v < 0 || static_cast<std::size_t>(v) >= n)
            throw IndexError("tour index " + std::to_string(v) + " out of range");
        if (seen[v]++) throw IndexError("tour repeats index " + std::to_string(v));
    }
}

double edge_length(const StripInstance& inst, const Edge& e) {
    if (e.from == e.to) throw IndexError("edge endpoints coincide");
    return distance(inst.at(e.from), inst.at(e.to));
}

double edges_length(const StripInstance& inst, std::span<const Edge> edges) {
    double total = 0.0;
    for (const Edge& e : edges) total += edge_length(inst, e);
    return total;
}

double tour_length(const StripInstance& inst, const Tour& t) {
    check_permutation(t.order(), inst.size());
    const auto& o = t.order();
    double total = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i)
        total += inst.dist(o[i], o[(i + 1) % o.size()]);
    return total;
}

Separator combinatorial_separator(const StripInstance& inst, int i) {
    if (i < 1 || static_cast<std::size_t>(i) >= inst.size())
        throw IndexError("separator index " + std::to_string(i) + " out of range");
    const double a = inst[i - 1].x;
    const double b = inst[i].x;
    if (!(a < b))
        throw DegenerateSeparatorError("points " + std::to_string(i - 1) + " and " +
                                       std::to_string(i) + " share an x-coordinate");
    return {a + (b - a) / 2.0, i};
}

int tonicity_at(std::span<const Edge> edges, const Separator& s,
                const StripInstance& inst) {
    int count = 0;
    for (const Edge& e : edges) {
        const double xa = inst.at(e.from).x;
        const double xb = inst.at(e.to).x;
        if (xa == s.x_line || xb == s.x_line)
            throw DegenerateSeparatorError("separator passes through an edge endpoint");
        if ((xa < s.x_line) != (xb < s.x_line)) ++count;
    }
    return count;
}

std::vector<int> tonicity_profile(std::span<const Edge> edges,
                                  const StripInstance& inst) {
    const int n = static_cast<int>(inst.size());
    std::vector<int> profile;
    profile.reserve(n > 0 ? n - 1 : 0);
    for (int i = 1; i < n; ++i)
        profile.push_back(tonicity_at(edges, combinatorial_separator(inst, i), inst));
    return profile;
}

bool is_k_tonic(std::span<const Edge> edges, int k, const StripInstance& inst) {
    for (int t : tonicity_profile(edges, inst))
        if (t > k) return false;
    return true;
}

bool lower_tonicity(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw PreconditionError("profile sizes differ");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

bool strictly_lower_tonicity(std::span<const int> a, std::span<const int> b) {
    if (!lower_tonicity(a, b)) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < b[i]) return true;
    return false;
}

namespace {

// Next whitespace-separated token, skipping '#' comments to end of line.
bool next_token(std::istream& in, std::string& tok) {
    tok.clear();
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string rest;
            std::getline(in, rest);
            if (!tok.empty()) return true;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return true;
            continue;
        }
        tok.push_back(c);
    }
    return !tok.empty();
}

double parse_real(const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size()) throw ConfigError("malformed number '" + tok + "'");
    return v;
}

}  // namespace

StripInstance read_instance(std::istream& in) {
    std::string tok;
    if (!next_token(in, tok)) throw ConfigError("empty instance");
    const double n_real = parse_real(tok);
    if (n_real < 0 || n_real != std::floor(n_real))
        throw ConfigError("point count must be a non-negative integer");
    const auto n = static_cast<std::size_t>(n_real);
    if (!next_token(in, tok)) throw ConfigError("missing strip width");
    const double delta = parse_real(tok);
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point p;
        if (!next_token(in, tok)) throw ConfigError("truncated instance");
        p.x = parse_real(tok);
        if (!next_token(in, tok)) throw ConfigError("truncated instance");
        p.y = parse_real(tok);
        pts.push_back(p);
    }
    if (next_token(in, tok)) throw ConfigError("trailing data after " + std::to_string(n) + " points");
    return StripInstance(std::move(pts), delta);
}

StripInstance read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return read_instance(in);
}

void write_instance(std::ostream& out, const StripInstance& inst) {
    auto old = out.precision(17);
    out << inst.size() << ' ' << inst.delta() << '\n';
    for (const Point& p : inst.points()) out << p.x << ' ' << p.y << '\n';
    out.precision(old);
}

std::string instance_to_string(const StripInstance& inst) {
    std::ostringstream os;
    write_instance(os, inst);
    return os.str();
}

}  // namespace striptsp
