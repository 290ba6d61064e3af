#include "gcnalign/graph.h"

#include <algorithm>
#include <sstream>

namespace gcnalign {

std::string KnowledgeGraph::entity_label(EntityId e) const {
  if (static_cast<std::size_t>(e) < entity_labels.size()) {
    return entity_labels[e];
  }
  return std::to_string(e);
}

std::string_view to_string(SplitRole role) {
  switch (role) {
    case SplitRole::kTrain:
      return "train";
    case SplitRole::kValidation:
      return "validation";
    case SplitRole::kTest:
      return "test";
  }
  return "unknown";
}

std::vector<AlignedPair> AlignmentSet::with_role(SplitRole role) const {
  std::vector<AlignedPair> out;
  std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(out),
               [role](const AlignedPair& p) { return p.role == role; });
  return out;
}

std::size_t AlignmentSet::count(SplitRole role) const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(),
                    [role](const AlignedPair& p) { return p.role == role; }));
}

namespace {

void validate_graph(const KnowledgeGraph& g, const char* side,
                    std::vector<std::string>& out) {
  const auto n = static_cast<std::int64_t>(g.entity_count);
  const auto m = static_cast<std::int64_t>(g.relation_count);
  for (std::size_t i = 0; i < g.triples.size(); ++i) {
    const Triple& t = g.triples[i];
    if (t.head < 0 || t.head >= n || t.tail < 0 || t.tail >= n ||
        t.relation < 0 || t.relation >= m) {
      std::ostringstream msg;
      msg << side << " triple #" << i << " (" << t.head << ", " << t.relation
          << ", " << t.tail << ") out of range (entities=" << n
          << ", relations=" << m << ")";
      out.push_back(msg.str());
    }
  }
  if (!g.entity_labels.empty() && g.entity_labels.size() != g.entity_count) {
    out.push_back(std::string(side) + " entity label count " +
                  std::to_string(g.entity_labels.size()) +
                  " != entity_count " + std::to_string(g.entity_count));
  }
  if (!g.relation_labels.empty() &&
      g.relation_labels.size() != g.relation_count) {
    out.push_back(std::string(side) + " relation label count " +
                  std::to_string(g.relation_labels.size()) +
                  " != relation_count " + std::to_string(g.relation_count));
  }
}

void validate_attributes(const std::optional<AttributeTable>& table,
                         const KnowledgeGraph& g, const char* side,
                         std::vector<std::string>& out) {
  if (!table) return;
  if (table->entity_count != g.entity_count) {
    out.push_back(std::string(side) + " attribute rows " +
                  std::to_string(table->entity_count) + " != entity_count " +
                  std::to_string(g.entity_count));
  }
  if (table->values.size() != table->entity_count * table->dim) {
    out.push_back(std::string(side) + " attribute value buffer has wrong size");
  }
}

}  // namespace

std::vector<std::string> validate_pair(const GraphPair& pair) {
  std::vector<std::string> out;
  validate_graph(pair.left, "left", out);
  validate_graph(pair.right, "right", out);
  validate_attributes(pair.attributes_left, pair.left, "left", out);
  validate_attributes(pair.attributes_right, pair.right, "right", out);

  std::vector<char> seen_left(pair.left.entity_count, 0);
  std::vector<char> seen_right(pair.right.entity_count, 0);
  const auto& pairs = pair.alignment.pairs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const AlignedPair& p = pairs[i];
    const bool left_ok =
        p.left >= 0 && static_cast<std::size_t>(p.left) < pair.left.entity_count;
    const bool right_ok = p.right >= 0 && static_cast<std::size_t>(p.right) <
                                              pair.right.entity_count;
    if (!left_ok || !right_ok) {
      out.push_back("alignment #" + std::to_string(i) + " (" +
                    std::to_string(p.left) + ", " + std::to_string(p.right) +
                    ") references an entity out of range");
      continue;
    }
    if (seen_left[p.left]) {
      out.push_back("alignment #" + std::to_string(i) + ": left entity " +
                    std::to_string(p.left) + " aligned more than once");
    }
    if (seen_right[p.right]) {
      out.push_back("alignment #" + std::to_string(i) + ": right entity " +
                    std::to_string(p.right) + " aligned more than once");
    }
    seen_left[p.left] = 1;
    seen_right[p.right] = 1;
  }
  return out;
}

}  // namespace gcnalign
