#pragma once

#include <stdexcept>
#include <string>

namespace fractile {

// Failure categories surfaced by the library. The CLI maps these to exit
// codes: input problems -> 2, domain/admissibility problems -> 1,
// budget overruns -> 3.
enum class Errc {
    parse_error,
    too_few_maps,
    not_contractive,
    inadmissible_parameter,
    degenerate_hull,
    degenerate_image,
    budget_exceeded,
    too_many_components,
    not_admissible,
    not_self_similar,
    geometry_unsupported,
    near_pole,
    window_too_large,
    divergent_tail,
    insufficient_range,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::parse_error: return "ParseError";
        case Errc::too_few_maps: return "TooFewMaps";
        case Errc::not_contractive: return "NotContractive";
        case Errc::inadmissible_parameter: return "InadmissibleParameter";
        case Errc::degenerate_hull: return "DegenerateHull";
        case Errc::degenerate_image: return "DegenerateImage";
        case Errc::budget_exceeded: return "BudgetExceeded";
        case Errc::too_many_components: return "TooManyComponents";
        case Errc::not_admissible: return "NotAdmissible";
        case Errc::not_self_similar: return "NotSelfSimilar";
        case Errc::geometry_unsupported: return "GeometryUnsupported";
        case Errc::near_pole: return "NearPole";
        case Errc::window_too_large: return "WindowTooLarge";
        case Errc::divergent_tail: return "DivergentTail";
        case Errc::insufficient_range: return "InsufficientRange";
    }
    return "UnknownError";
}

}  // namespace fractile
