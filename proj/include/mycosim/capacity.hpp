#pragma once

#include "mycosim/common.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace mycosim {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact value of a decimal literal such as "1.5", "-2e3" or "0.1". Throws DomainError on anything else.
Rational parse_decimal(std::string_view text);

/// Tip density given as a range of tip counts over a range of substrate volumes.
struct DensitySpec {
    Rational tips_min = 1;
    Rational tips_max = 1;
    Rational volume_min_mm3 = 1;
    Rational volume_max_mm3 = 1;
    Rational target_m3 = 1;
    Rational junctions_per_tip = 1;

    void validate() const;
};

struct CapacityRange {
    Rational exact_min;
    Rational exact_max;
    /// Exact values rounded half away from zero.
    BigInt min_count;
    BigInt max_count;
};

/**
 * Junction count over the target volume at both ends of the density range:
 * the low end pairs the fewest tips with the largest volume, the high end the
 * most tips with the smallest volume.
 */
CapacityRange processor_count(const DensitySpec& spec);

/// `x` in scientific notation with `digits` significant figures, e.g. "3.33e9".
std::string format_sig(const Rational& x, int digits);

}  // namespace mycosim
