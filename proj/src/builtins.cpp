#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "screenrev/scenario.hpp"

namespace screenrev
{
namespace
{
constexpr std::array<std::pair<std::string_view, std::string_view>, 9> builtins{{
    {"thm1", R"([scenario]
name = thm1
description = Higher point signal yields the worse posterior under the triangle+rectangle kernel

[prior]
family = uniform 0 1

[kernel]
kind = triangle_rectangle

[signal]
type = point

[conditions]
z = 1 2
pairs = 1 2

[checks]
fosd = strict_dominates
prior_equal = 2
kernel_mass = on
oracle = on
)"},
    {"cor1", R"([scenario]
name = cor1
description = Expected value given S >= b falls from 7/12 to 1/2 as the cutoff rises

[prior]
family = uniform 0 1

[kernel]
kind = triangle_rectangle

[signal]
type = transform

[conditions]
cutoffs = 1 2
pairs = 1 2

[checks]
curve = on
curve_expect = 7/12 1/2
reversal = present
fosd = strict_dominates
oracle = on
)"},
    {"cor2_continuous", R"([scenario]
name = cor2_continuous
description = Reversal survives a continuous three-piece kernel

[prior]
family = uniform 0 1

[kernel]
kind = three_piece
iota = 0.1
xi = 1

[signal]
type = point

[conditions]
z = 1 2
pairs = 1 2

[checks]
kernel_mass = on
fosd = strict_dominates
oracle = on
)"},
    {"lemma_ruleout", R"([scenario]
name = lemma_ruleout
description = Values reachable only from the higher signal rule out dominance

[prior]
family = uniform 0 2

[kernel]
kind = additive
noise = uniform 0 1

[signal]
type = point

[conditions]
z = 0.5 1.5
pairs = 0.5 1.5

[checks]
ruleout_lemma = lemma_high_values
fosd = not strict_dominates weak_dominates
)"},
    {"cor3_ruleout", R"([scenario]
name = cor3_ruleout
description = Bounded noise narrower than the prior support rules out dominance for every pair

[prior]
family = uniform 0 1

[kernel]
kind = additive
noise = uniform 0 0.5

[signal]
type = point

[conditions]
z = 0.25 0.75 1
pairs = 0.25 0.75, 0.75 1

[checks]
ruleout_corollary = corollary_i
fosd = not strict_dominates weak_dominates
)"},
    {"thm2_pareto", R"([scenario]
name = thm2_pareto
description = Pareto noise with decreasing likelihood slope gives dominance above the noise threshold

[prior]
family = uniform -1 0

[kernel]
kind = additive
noise = pareto 2 1

[signal]
type = point

[conditions]
z = 1.25 1.5 2 3
pairs = 1 1.25, 1.25 1.5, 1.5 2, 2 3, 1 3
w = -0.75 -0.5 -0.25

[checks]
noise_threshold = 1
thm2 = strictly_decreasing
fosd = strict_dominates
derivative = positive
oracle = on
)"},
    {"cor5_exponential", R"([scenario]
name = cor5_exponential
description = Exponential noise leaves the posterior unchanged above the support

[prior]
family = uniform -1 0

[kernel]
kind = additive
noise = exponential 1

[signal]
type = point

[conditions]
z = 1 2 5
pairs = 1 2, 2 5, 1 5
w = -0.75 -0.5 -0.25

[checks]
tol = 1e-8
noise_threshold = 0
thm2 = weakly_decreasing
fosd = equal
derivative = zero
)"},
    {"tax_mixture", R"([scenario]
name = tax_mixture
description = Truthful-or-overstated reports make a zero report the worst news

[prior]
family = exponential 1 0 -1
truncate = -30 0

[kernel]
kind = evasion
p = constant 0.3
noise = exponential 1

[signal]
type = point

[conditions]
z = 0 0.5 1 2 5
w = -2 -1 -0.5

[checks]
kernel_mass = on
tax = holds
oracle = on
)"},
    {"footnote2", R"([scenario]
name = footnote2
description = Expectation reversal persists while dominance fails for a prior with unbounded support

[prior]
family = footnote_mixture 0.05

[kernel]
kind = triangle_rectangle

[signal]
type = transform

[conditions]
cutoffs = 1 2
pairs = 1 2

[checks]
curve = on
reversal = present
fosd = not strict_dominates
ruleout_corollary = corollary_i
oracle = on
)"},
}};
}  // namespace

std::vector<std::string> builtin_names()
{
    std::vector<std::string> out;
    for (auto const& [name, text] : builtins)
        out.emplace_back(name);
    return out;
}

std::string builtin_text(std::string_view name)
{
    for (auto const& [n, text] : builtins)
        if (n == name)
            return std::string(text);
    return {};
}

}  // namespace screenrev
