#include "falcon/synthetic.hpp"

#include <string>

namespace falcon::synth {

kind kind_from_name(std::string_view name) {
    if (name == "random-walk" || name == "walk")
        return kind::random_walk;
    if (name == "fixed-decimal" || name == "decimal")
        return kind::fixed_decimal;
    if (name == "sign-flip" || name == "signflip")
        return kind::sign_flip;
    if (name == "outlier-injected" || name == "outlier")
        return kind::outlier_injected;
    if (name == "uniform-bits" || name == "bits")
        return kind::uniform_bits;
    throw error("unknown data kind: " + std::string(name));
}

std::string_view kind_name(kind k) {
    switch (k) {
    case kind::random_walk: return "random-walk";
    case kind::fixed_decimal: return "fixed-decimal";
    case kind::sign_flip: return "sign-flip";
    case kind::outlier_injected: return "outlier-injected";
    case kind::uniform_bits: return "uniform-bits";
    }
    return "unknown";
}

} // namespace falcon::synth
