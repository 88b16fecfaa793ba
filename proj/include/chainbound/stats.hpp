#pragma once

#include <vector>

namespace chainbound {

// Sample summary over repeated solver draws. The half-width uses a Student-t
// quantile at 95% with n-1 degrees of freedom; a single draw carries no
// spread information, so sd and ci95 are reported as zero.
struct SampleStats {
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;    // sample standard deviation (n-1 denominator)
    double ci95 = 0.0;  // half-width of the 95% confidence interval
};

SampleStats summarize(const std::vector<double>& values);

}  // namespace chainbound
