#include "chainbound/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace chainbound {

SampleStats summarize(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("summarize: no values");
    SampleStats s;
    s.n = static_cast<int>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= s.n;
    if (s.n == 1) return s;  // sd and ci95 stay zero

    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));

    const boost::math::students_t dist(s.n - 1);
    const double t = boost::math::quantile(dist, 0.975);
    s.ci95 = t * s.sd / std::sqrt(static_cast<double>(s.n));
    return s;
}

}  // namespace chainbound
