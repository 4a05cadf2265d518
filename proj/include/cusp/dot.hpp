#pragma once

// DOT export of core graphs (letter-labeled automata) and of the nerve of a
// depth-n partition (classes as nodes, adjacency = two member cylinders
// sharing a length-(n-1) prefix).

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "cusp/quotient.hpp"
#include "cusp/stallings.hpp"

namespace cusp {

inline std::string export_dot(const CoreGraph& core) {
  std::ostringstream out;
  out << "digraph core {\n  rankdir=LR;\n";
  for (int v = 0; v < core.n(); ++v)
    out << "  " << v << " [shape=" << (v == core.base ? "doublecircle" : "circle") << "];\n";
  // One arrow per geometric edge: positive letters only.
  for (int v = 0; v < core.n(); ++v)
    for (int l = 0; l < 2 * core.rank; l += 2)
      if (core.next[v][l] >= 0)
        out << "  " << v << " -> " << core.next[v][l] << " [label=\""
            << letter_to_char(static_cast<Letter>(l)) << "\"];\n";
  out << "}\n";
  return out.str();
}

inline std::string export_dot(const CylinderPartition& part) {
  std::ostringstream out;
  out << "digraph nerve {\n";
  for (int c = 0; c < static_cast<int>(part.classes.size()); ++c) {
    out << "  " << c << " [label=\"" << format_word(part.cylinders[part.classes[c].front()]);
    if (part.classes[c].size() > 1) out << "+" << (part.classes[c].size() - 1);
    out << "\"";
    if (part.parabolic[c]) out << ", shape=box";
    out << "];\n";
  }
  // Classes are adjacent when members share a parent vertex in the tree.
  std::map<ReducedWord, std::set<int>> by_parent;
  for (int i = 0; i < static_cast<int>(part.cylinders.size()); ++i)
    by_parent[prefix(part.cylinders[i], part.depth - 1)].insert(part.class_of[i]);
  std::set<std::pair<int, int>> edges;
  for (const auto& [_, classes] : by_parent)
    for (auto a = classes.begin(); a != classes.end(); ++a)
      for (auto b = std::next(a); b != classes.end(); ++b) edges.insert({*a, *b});
  for (auto [a, b] : edges) out << "  " << a << " -> " << b << " [dir=none];\n";
  out << "}\n";
  return out.str();
}

}  // namespace cusp
