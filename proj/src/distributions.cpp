#include "cldp/distributions.hpp"

#include <cstdlib>

namespace cldp {

JumpModel parse_jump_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    if (family != "pareto")
        throw DomainError("unknown jump family '" + family + "' (supported: pareto:alpha=A)");
    if (colon == std::string::npos) throw DomainError("jump spec missing parameters, expected pareto:alpha=A");
    const std::string params = spec.substr(colon + 1);
    const std::string key = "alpha=";
    if (params.rfind(key, 0) != 0) throw DomainError("jump spec expects alpha=A, got '" + params + "'");
    char* end = nullptr;
    const double alpha = std::strtod(params.c_str() + key.size(), &end);
    if (end == params.c_str() + key.size() || *end != '\0')
        throw DomainError("could not parse alpha in jump spec '" + spec + "'");
    return make_standardized_pareto(alpha);
}

}  // namespace cldp
