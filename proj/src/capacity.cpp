#include "mycosim/capacity.hpp"

#include <cctype>

namespace mycosim {

Rational parse_decimal(std::string_view text) {
    auto fail = [&] { return DomainError("not a decimal number: '" + std::string(text) + "'"); };
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
    BigInt mantissa = 0;
    long scale = 0;
    bool digits = false;
    bool point = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            digits = true;
            if (point) --scale;
        } else if (c == '.' && !point) {
            point = true;
        } else {
            break;
        }
    }
    if (!digits) throw fail();
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw fail();
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
        if (i == text.size()) throw fail();
        long exponent = 0;
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i])) || exponent > 100000) throw fail();
            exponent = exponent * 10 + (text[i] - '0');
        }
        scale += exp_negative ? -exponent : exponent;
    }
    Rational value(mantissa);
    const BigInt power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
    value = scale < 0 ? value / Rational(power) : value * Rational(power);
    return negative ? Rational(-value) : value;
}

void DensitySpec::validate() const {
    if (volume_min_mm3 <= 0 || volume_max_mm3 <= 0 || target_m3 <= 0) {
        throw DomainError("volumes must be positive");
    }
    if (tips_min < 0 || junctions_per_tip < 0) throw DomainError("tip counts and junction ratio must be non-negative");
    if (tips_min > tips_max) throw DomainError("minimum tip count exceeds the maximum");
    if (volume_min_mm3 > volume_max_mm3) throw DomainError("minimum volume exceeds the maximum");
}

namespace {

BigInt round_half_away(const Rational& x) {
    const BigInt num = boost::multiprecision::numerator(x);
    const BigInt den = boost::multiprecision::denominator(x);
    const BigInt twice = 2 * abs(num) + den;
    const BigInt magnitude = twice / (2 * den);
    return num < 0 ? BigInt(-magnitude) : magnitude;
}

}  // namespace

CapacityRange processor_count(const DensitySpec& spec) {
    spec.validate();
    const Rational target_mm3 = spec.target_m3 * Rational(1'000'000'000);
    CapacityRange r;
    r.exact_min = spec.tips_min / spec.volume_max_mm3 * target_mm3 * spec.junctions_per_tip;
    r.exact_max = spec.tips_max / spec.volume_min_mm3 * target_mm3 * spec.junctions_per_tip;
    r.min_count = round_half_away(r.exact_min);
    r.max_count = round_half_away(r.exact_max);
    return r;
}

std::string format_sig(const Rational& x, int digits) {
    if (x == 0) return "0";
    Rational mag = x < 0 ? Rational(-x) : x;
    int exponent = 0;
    while (mag >= 10) {
        mag /= 10;
        ++exponent;
    }
    while (mag < 1) {
        mag *= 10;
        --exponent;
    }
    const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(digits - 1));
    BigInt scaled = round_half_away(mag * Rational(scale));
    if (scaled >= scale * 10) {
        scaled /= 10;
        ++exponent;
    }
    std::string d = scaled.str();
    std::string out = x < 0 ? "-" : "";
    out += d.substr(0, 1);
    if (d.size() > 1) out += "." + d.substr(1);
    return out + "e" + std::to_string(exponent);
}

}  // namespace mycosim
