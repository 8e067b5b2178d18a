#pragma once

#include <set>
#include <string>
#include <string_view>

namespace polycalc {

// F2 combination of named module generators; addition is symmetric difference.
struct F2Sum {
    std::set<std::string> terms;

    void add(const std::string& g) {
        auto it = terms.find(g);
        if (it == terms.end())
            terms.insert(g);
        else
            terms.erase(it);
    }
    void add(const F2Sum& o) {
        for (const auto& g : o.terms) add(g);
    }
    bool is_zero() const { return terms.empty(); }
    std::string str() const {
        if (terms.empty()) return "0";
        std::string out;
        for (const auto& g : terms) {
            if (!out.empty()) out += "+";
            out += g;
        }
        return out;
    }
    static F2Sum parse(std::string_view text);

    friend bool operator==(const F2Sum&, const F2Sum&) = default;
};

}  // namespace polycalc
