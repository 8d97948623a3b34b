#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "striptsp/errors.h"

namespace striptsp {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

/// A point set inside the horizontal strip [0, delta]. Points are kept
/// sorted by (x, y); every index used elsewhere refers to this order.
class StripInstance {
public:
    StripInstance(std::vector<Point> points, double delta);

    std::size_t size() const { return points_.size(); }
    double delta() const { return delta_; }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    const Point& at(std::size_t i) const;
    std::span<const Point> points() const { return points_; }

    double dist(std::size_t i, std::size_t j) const;

    /// True if x-coordinates are strictly increasing.
    bool distinct_x() const;

private:
    std::vector<Point> points_;
    double delta_;
};

struct Edge {
    int from = 0;
    int to = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgeSet = std::vector<Edge>;

/// A cyclic visiting order. Construction canonicalizes: rotated so that
/// index 0 is first and oriented so that order[1] < order.back().
class Tour {
public:
    Tour() = default;
    explicit Tour(std::vector<int> order);

    const std::vector<int>& order() const { return order_; }
    std::size_t size() const { return order_.size(); }

    /// Directed edges following the stored orientation, closing edge last.
    EdgeSet edges() const;

    friend bool operator==(const Tour&, const Tour&) = default;

private:
    std::vector<int> order_;
};

/// Vertical line x = x_line. `index` is i for the combinatorial separator
/// s_i between p_i and p_{i+1} (1-based), or 0 for a free-standing line.
struct Separator {
    double x_line = 0.0;
    int index = 0;
};

double edge_length(const StripInstance& inst, const Edge& e);
double edges_length(const StripInstance& inst, std::span<const Edge> edges);
double tour_length(const StripInstance& inst, const Tour& t);

/// Separator s_i, i in [1, n-1], halfway between x_i and x_{i+1}.
Separator combinatorial_separator(const StripInstance& inst, int i);

int tonicity_at(std::span<const Edge> edges, const Separator& s,
                const StripInstance& inst);

/// (ton(E, s_1), ..., ton(E, s_{n-1})). Requires strictly increasing x.
std::vector<int> tonicity_profile(std::span<const Edge> edges,
                                  const StripInstance& inst);

bool is_k_tonic(std::span<const Edge> edges, int k, const StripInstance& inst);

/// Componentwise a <= b (E ⪯ F on profiles).
bool lower_tonicity(std::span<const int> a, std::span<const int> b);
/// a ⪯ b with at least one strict entry.
bool strictly_lower_tonicity(std::span<const int> a, std::span<const int> b);

/// Validates that `order` is a permutation of 0..n-1.
void check_permutation(std::span<const int> order, std::size_t n);

// Text format: "n delta" then n lines "x y"; '#' starts a comment.
StripInstance read_instance(std::istream& in);
StripInstance read_instance_file(const std::string& path);
void write_instance(std::ostream& out, const StripInstance& inst);
std::string instance_to_string(const StripInstance& inst);

}  // namespace striptsp
