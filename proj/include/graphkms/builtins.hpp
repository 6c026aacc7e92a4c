#pragma once

// Packaged example graphs.

#include <memory>
#include <string>
#include <vector>

#include "graphkms/boundary.hpp"
#include "graphkms/errors.hpp"
#include "graphkms/graph.hpp"

namespace graphkms {

/** u ←e— v */
inline DiscreteGraph two_vertex_graph()
{
    return DiscreteGraph({"u", "v"}, {{"e", "v", "u"}});
}

/** u ←e— v —f→ w */
inline DiscreteGraph three_vertex_flow_graph()
{
    return DiscreteGraph({"u", "v", "w"}, {{"e", "v", "u"}, {"f", "v", "w"}});
}

/** Vertices v_n, edges e_n with s(e_n) = v_n and r(e_n) = v_{n-1}, n ∈ ℤ. */
inline WindowRules double_line_rules()
{
    return WindowRules{"v{n}", {EdgeTemplate{"e{n}", 0, -1}}};
}

inline DiscreteGraph double_line_graph(long radius = 3)
{
    return DiscreteGraph::integer_line(radius, double_line_rules());
}

/** One vertex v with n loops l1, …, ln. */
inline DiscreteGraph bouquet_graph(std::size_t n)
{
    std::vector<EdgeRecord> edges;
    for (std::size_t i = 1; i <= n; ++i)
        edges.push_back({"l" + std::to_string(i), "v", "v"});
    return DiscreteGraph({"v"}, edges);
}

/** Directed n-cycle: c_i runs from v_i to v_{i+1 mod n}. */
inline DiscreteGraph cycle_graph(std::size_t n)
{
    std::vector<VertexId> vertices;
    std::vector<EdgeRecord> edges;
    for (std::size_t i = 0; i < n; ++i) {
        vertices.push_back("v" + std::to_string(i));
        edges.push_back({"c" + std::to_string(i), "v" + std::to_string(i), "v" + std::to_string((i + 1) % n)});
    }
    return DiscreteGraph(vertices, edges);
}

inline DiscreteGraph loop_graph()
{
    return DiscreteGraph({"v"}, {{"l", "v", "v"}});
}

inline const std::vector<std::string>& builtin_names()
{
    static const std::vector<std::string> names{"two-vertex", "three-vertex-flow", "double-line",
                                                "bouquet-4",  "cycle-3",           "loop"};
    return names;
}

/** Named graph; "bouquet-N" accepts any N ≥ 1. */
inline GraphPtr builtin_graph(const std::string& name)
{
    if (name == "two-vertex")
        return std::make_shared<const DiscreteGraph>(two_vertex_graph());
    if (name == "three-vertex-flow")
        return std::make_shared<const DiscreteGraph>(three_vertex_flow_graph());
    if (name == "double-line")
        return std::make_shared<const DiscreteGraph>(double_line_graph());
    if (name == "cycle-3")
        return std::make_shared<const DiscreteGraph>(cycle_graph(3));
    if (name == "loop")
        return std::make_shared<const DiscreteGraph>(loop_graph());
    const std::string bouquet = "bouquet-";
    if (name.rfind(bouquet, 0) == 0 && name.size() > bouquet.size() && name.size() <= bouquet.size() + 3 &&
        name.find_first_not_of("0123456789", bouquet.size()) == std::string::npos) {
        const auto n = std::stoul(name.substr(bouquet.size()));
        if (n >= 1)
            return std::make_shared<const DiscreteGraph>(bouquet_graph(n));
    }
    throw UnknownIdentifier("no builtin graph named '" + name + "'");
}

} // namespace graphkms
