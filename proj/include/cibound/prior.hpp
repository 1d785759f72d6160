#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace cibound {

/// The two discrete prior distributions used as multipliers on the coverage
/// and maximum-SEL constraints: point locations gamma1/gamma2 with
/// nonnegative masses nu1/nu2. Locations are strictly increasing,
/// gamma1(1) >= 0 and gamma2(1) > 0.
struct PriorPair {
    std::vector<double> gamma1;
    std::vector<double> nu1;
    std::vector<double> gamma2;
    std::vector<double> nu2;

    void validate() const {
        if (gamma1.size() != nu1.size() || gamma2.size() != nu2.size())
            throw std::invalid_argument("PriorPair: location/mass size mismatch");
        for (std::size_t i = 0; i < gamma1.size(); ++i) {
            if (!(gamma1[i] >= 0.0)) throw std::invalid_argument("PriorPair: gamma1 must be >= 0");
            if (i > 0 && !(gamma1[i] > gamma1[i - 1]))
                throw std::invalid_argument("PriorPair: gamma1 must be strictly increasing");
            if (!(nu1[i] >= 0.0)) throw std::invalid_argument("PriorPair: nu1 must be >= 0");
        }
        for (std::size_t i = 0; i < gamma2.size(); ++i) {
            if (!(gamma2[i] > 0.0)) throw std::invalid_argument("PriorPair: gamma2 must be > 0");
            if (i > 0 && !(gamma2[i] > gamma2[i - 1]))
                throw std::invalid_argument("PriorPair: gamma2 must be strictly increasing");
            if (!(nu2[i] >= 0.0)) throw std::invalid_argument("PriorPair: nu2 must be >= 0");
        }
    }

    double nu2_sum() const { return std::accumulate(nu2.begin(), nu2.end(), 0.0); }

    nlohmann::json to_json() const {
        return {{"gamma1", gamma1}, {"nu1", nu1}, {"gamma2", gamma2}, {"nu2", nu2}};
    }

    static PriorPair from_json(const nlohmann::json& j) {
        PriorPair p{j.at("gamma1").get<std::vector<double>>(),
                    j.at("nu1").get<std::vector<double>>(),
                    j.at("gamma2").get<std::vector<double>>(),
                    j.at("nu2").get<std::vector<double>>()};
        p.validate();
        return p;
    }
};

}  // namespace cibound
