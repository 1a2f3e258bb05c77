#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oscimax/phase.hpp"
#include "oscimax/testfns.hpp"

namespace oscimax {

// Phase spec, in one of three forms:
//   inline   zero | laurent:<poly> | curved:<sum> | quadratic:<a> | separable:<α(x)>;<β(t)>;<‖α‖∞>
//            <poly> is a sum of c*t^k (integer k, c numeric), e.g. "t^3", "0.01*t^2-t^-1";
//            <sum> is a sum of c*|t|^d, e.g. "|t|^2.5", "2*|t|^2+|t|^3".
//   JSON     text starting with '{', see phase_from_json
//   file     path to a JSON file
// Throws ConfigError on anything malformed.
Phase parse_phase(const std::string& spec);

// {"family": "zero"|"laurent"|"curved"|"quadratic"|"separable", ...}
//   laurent:   "exponents": [ints], "coeffs": [coef]
//   curved:    "exponents": [reals], "coeffs": [coef]
//   quadratic: "a": coef
//   separable: "alpha": coef, "beta": "<expr in t>"
// coef is a number or {"expr": "<expr in x>", "sup": ‖c‖∞, "inv_sup": ‖1/c‖∞ (optional)}.
Phase phase_from_json(const nlohmann::json& j);

// Function spec:
//   inline   char:β | atom:β | bump:c,s,h | step:b0,b1,...;v0,v1,...
//            | counterexample1:K | counterexample2:N
//   JSON     {"type": "step"|"bump", ...}
//   file     path to a JSON file
Function parse_function(const std::string& spec);

// Comma-separated reals ("1e-2,1e-3").
std::vector<double> parse_real_list(const std::string& text);

}  // namespace oscimax
