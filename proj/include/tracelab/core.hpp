#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tracelab {

inline constexpr double pi = std::numbers::pi;

/// Raised when a module rejects its input (bad parameters, failed solve,
/// incompatible graph). The message is the diagnostic shown to the user.
class Rejection : public std::runtime_error {
public:
    explicit Rejection(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw Rejection(what);
}

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline Point lerp(Point a, Point b, double t)
{
    return {std::lerp(a.x, b.x, t), std::lerp(a.y, b.y, t)};
}

/// Axis-aligned square [cx-R, cx+R] x [cy-R, cy+R].
struct Window {
    double half_width = 1.0;
    Point center{};

    Window() = default;
    Window(double r, Point c = {}) : half_width(r), center(c)
    {
        require(r > 0.0, "window half-width must be positive, got " + std::to_string(r));
    }

    double xmin() const { return center.x - half_width; }
    double xmax() const { return center.x + half_width; }
    double ymin() const { return center.y - half_width; }
    double ymax() const { return center.y + half_width; }

    bool contains(Point p, double tol = 1e-12) const
    {
        const double s = tol * std::max(1.0, half_width);
        return p.x >= xmin() - s && p.x <= xmax() + s && p.y >= ymin() - s && p.y <= ymax() + s;
    }
};

/// Nearest integer to x when x is integral up to a relative tolerance, else -1.
inline long long integral_ratio(double x, double tol = 1e-9)
{
    const double r = std::round(x);
    if (r < 0.0 || std::abs(x - r) > tol * std::max(1.0, std::abs(x))) return -1;
    return static_cast<long long>(r);
}

}  // namespace tracelab
