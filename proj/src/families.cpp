#include "kms/families.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace kms {

namespace {

constexpr const char* kArmLetters = "abcdefghijklmnopqrstuvwxyz";

std::string arm_vertex(int arm, int level) {
  // level > 0 is the outward chain, level < 0 the return chain.
  std::string s(1, kArmLetters[arm]);
  return s + std::to_string(level);
}

}  // namespace

LatticeWalk LatticeWalk::make(int dim,
                              std::vector<std::pair<std::vector<int>, std::int64_t>> support) {
  if (dim < 1) throw std::invalid_argument("lattice dimension must be >= 1");
  if (support.empty()) throw std::invalid_argument("lattice walk needs a nonempty support");
  for (auto& [step, count] : support) {
    if (static_cast<int>(step.size()) != dim)
      throw std::invalid_argument("lattice step has wrong dimension");
    if (count < 1) throw std::invalid_argument("lattice multiplicity must be >= 1");
  }
  std::sort(support.begin(), support.end());
  for (std::size_t i = 0; i + 1 < support.size(); ++i)
    if (support[i].first == support[i + 1].first)
      throw std::invalid_argument("duplicate lattice step");
  LatticeWalk w;
  w.dim = dim;
  w.support = std::move(support);
  return w;
}

std::int64_t LatticeWalk::multiplicity(const std::vector<int>& step) const {
  for (const auto& [s, c] : support)
    if (s == step) return c;
  return 0;
}

int LatticeWalk::max_step_norm() const {
  int r = 0;
  for (const auto& [s, c] : support)
    for (int x : s) r = std::max(r, std::abs(x));
  return r;
}

std::string to_string(NwClass c) {
  switch (c) {
    case NwClass::empty: return "empty";
    case NwClass::nonempty_finite: return "nonempty-finite";
    case NwClass::nonempty_infinite: return "nonempty-infinite";
    case NwClass::undetermined: return "undetermined";
  }
  return "undetermined";
}

GraphFamily GraphFamily::explicit_graph(FiniteGraph g) {
  GraphFamily f;
  f.kind_ = Kind::explicit_finite;
  f.explicit_ = std::move(g);
  f.traits_.provenance = "explicit finite graph; structure computed exactly";
  return f;
}

GraphFamily GraphFamily::arms(int n_arms) {
  if (n_arms < 1 || n_arms > 26) throw std::invalid_argument("arm count must be in 1..26");
  GraphFamily f;
  f.kind_ = Kind::arms;
  f.param_ = n_arms;
  f.traits_.nw_class = NwClass::nonempty_infinite;
  f.traits_.cofinal = true;
  f.traits_.uniformly_bounded_out_degree = true;
  f.traits_.certified_d_prime = 0;
  f.traits_.provenance =
      "every vertex lies on a cycle through the hub and reaches every other vertex; "
      "out-degree <= max(arm count, 2); the only nonempty hereditary set is everything, "
      "and straight outward runs far along an arm admit no bounded-length detour, so no "
      "nonzero length difference is witnessed uniformly";
  return f;
}

GraphFamily GraphFamily::ladder() {
  GraphFamily f;
  f.kind_ = Kind::ladder;
  f.traits_.nw_class = NwClass::empty;
  f.traits_.cofinal = true;
  f.traits_.uniformly_bounded_out_degree = true;
  f.traits_.certified_d_prime = 1;
  f.traits_.provenance =
      "all edges increase the level, so no cycles; every vertex reaches the whole upper "
      "tail; out-degree <= 2; the level-shifted structure repeats, so local witnesses "
      "transport along the tail";
  return f;
}

GraphFamily GraphFamily::rose(int n_loops) {
  if (n_loops < 1) throw std::invalid_argument("rose needs at least one loop");
  GraphFamily f;
  f.kind_ = Kind::rose;
  f.param_ = n_loops;
  std::vector<Edge> edges;
  for (int i = 1; i <= n_loops; ++i)
    edges.push_back(Edge{"e" + std::to_string(i), "v", "v"});
  f.explicit_ = FiniteGraph::make({"v"}, std::move(edges));
  f.traits_.nw_class = NwClass::nonempty_finite;
  f.traits_.cofinal = true;
  f.traits_.uniformly_bounded_out_degree = true;
  f.traits_.provenance = "single vertex carrying all loops";
  return f;
}

GraphFamily GraphFamily::lattice_walk(LatticeWalk walk) {
  GraphFamily f;
  f.kind_ = Kind::lattice_walk;
  f.walk_ = std::move(walk);
  f.traits_.nw_class = NwClass::nonempty_infinite;
  f.traits_.cofinal = true;
  f.traits_.uniformly_bounded_out_degree = true;
  f.traits_.provenance =
      "translation invariant; the step semigroup is assumed to generate the lattice, "
      "which makes the graph cofinal with every vertex non-wandering (spot-checked by "
      "reachability of the origin and the unit steps)";
  return f;
}

const LatticeWalk& GraphFamily::walk() const {
  if (!walk_) throw std::logic_error("not a lattice walk family");
  return *walk_;
}

std::string GraphFamily::label() const {
  switch (kind_) {
    case Kind::explicit_finite: return "explicit";
    case Kind::arms: return "arms(" + std::to_string(param_) + ")";
    case Kind::ladder: return "ladder";
    case Kind::rose: return "rose(" + std::to_string(param_) + ")";
    case Kind::lattice_walk: {
      std::string s = "lattice-walk(d=" + std::to_string(walk_->dim) + ", mu=";
      bool first = true;
      for (const auto& [step, count] : walk_->support) {
        if (!first) s += ",";
        first = false;
        s += lattice_vertex_name(step) + ":" + std::to_string(count);
      }
      return s + ")";
    }
  }
  return "explicit";
}

std::optional<VertexId> GraphFamily::canonical_base() const {
  switch (kind_) {
    case Kind::arms:
    case Kind::ladder: return VertexId("1");
    case Kind::rose: return VertexId("v");
    case Kind::lattice_walk: return lattice_vertex_name(std::vector<int>(walk_->dim, 0));
    case Kind::explicit_finite: return std::nullopt;
  }
  return std::nullopt;
}

FiniteGraph GraphFamily::truncation(int depth) const {
  if (depth < 1) throw std::invalid_argument("truncation depth must be >= 1");
  switch (kind_) {
    case Kind::explicit_finite:
    case Kind::rose: return *explicit_;

    case Kind::arms: {
      std::vector<VertexId> vs{"1"};
      std::vector<Edge> es;
      std::set<VertexId> frontier;
      for (int a = 0; a < param_; ++a) {
        es.push_back(Edge{"1>" + arm_vertex(a, 1), "1", arm_vertex(a, 1)});
        es.push_back(Edge{arm_vertex(a, -1) + ">1", arm_vertex(a, -1), "1"});
        for (int n = 1; n <= depth; ++n) {
          vs.push_back(arm_vertex(a, n));
          vs.push_back(arm_vertex(a, -n));
          es.push_back(Edge{arm_vertex(a, n) + ">" + arm_vertex(a, -n), arm_vertex(a, n),
                            arm_vertex(a, -n)});
          if (n < depth)
            es.push_back(Edge{arm_vertex(a, n) + ">" + arm_vertex(a, n + 1), arm_vertex(a, n),
                              arm_vertex(a, n + 1)});
          if (n >= 2)
            es.push_back(Edge{arm_vertex(a, -n) + ">" + arm_vertex(a, -(n - 1)),
                              arm_vertex(a, -n), arm_vertex(a, -(n - 1))});
        }
        frontier.insert(arm_vertex(a, depth));  // missing the next outward edge
      }
      return FiniteGraph::make(std::move(vs), std::move(es), std::move(frontier));
    }

    case Kind::ladder: {
      std::vector<VertexId> vs{"1"};
      std::vector<Edge> es{Edge{"1>x0", "1", "x0"}, Edge{"1>y0", "1", "y0"}};
      for (int n = 0; n <= depth; ++n) {
        vs.push_back("x" + std::to_string(n));
        vs.push_back("y" + std::to_string(n));
        es.push_back(Edge{"x" + std::to_string(n) + ">y" + std::to_string(n),
                          "x" + std::to_string(n), "y" + std::to_string(n)});
        if (n < depth) {
          es.push_back(Edge{"y" + std::to_string(n) + ">y" + std::to_string(n + 1),
                            "y" + std::to_string(n), "y" + std::to_string(n + 1)});
          es.push_back(Edge{"y" + std::to_string(n) + ">x" + std::to_string(n + 1),
                            "y" + std::to_string(n), "x" + std::to_string(n + 1)});
        }
      }
      // y<depth> is missing both outgoing edges.
      return FiniteGraph::make(std::move(vs), std::move(es), {"y" + std::to_string(depth)});
    }

    case Kind::lattice_walk: {
      const LatticeWalk& w = *walk_;
      std::vector<std::vector<int>> points;
      std::vector<int> cur(w.dim, -depth);
      std::function<void(int)> fill = [&](int axis) {
        if (axis == w.dim) {
          points.push_back(cur);
          return;
        }
        for (int x = -depth; x <= depth; ++x) {
          cur[static_cast<std::size_t>(axis)] = x;
          fill(axis + 1);
        }
      };
      fill(0);
      std::vector<VertexId> vs;
      vs.reserve(points.size());
      std::set<std::vector<int>> window(points.begin(), points.end());
      std::vector<Edge> es;
      std::set<VertexId> frontier;
      for (const auto& p : points) {
        vs.push_back(lattice_vertex_name(p));
        for (const auto& [step, count] : w.support) {
          std::vector<int> q = p;
          for (int i = 0; i < w.dim; ++i) q[static_cast<std::size_t>(i)] += step[static_cast<std::size_t>(i)];
          if (!window.count(q)) {
            frontier.insert(lattice_vertex_name(p));
            continue;
          }
          std::string base = lattice_vertex_name(p) + ">" + lattice_vertex_name(q);
          if (count == 1) {
            es.push_back(Edge{base, lattice_vertex_name(p), lattice_vertex_name(q)});
          } else {
            for (std::int64_t j = 1; j <= count; ++j)
              es.push_back(Edge{base + "#" + std::to_string(j), lattice_vertex_name(p),
                                lattice_vertex_name(q)});
          }
        }
      }
      return FiniteGraph::make(std::move(vs), std::move(es), std::move(frontier));
    }
  }
  throw std::logic_error("unhandled family kind");
}

std::string lattice_vertex_name(const std::vector<int>& point) {
  std::string s = "(";
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(point[i]);
  }
  return s + ")";
}

std::vector<int> parse_lattice_vertex(const std::string& name, int dim) {
  if (name.size() < 3 || name.front() != '(' || name.back() != ')')
    throw std::invalid_argument("bad lattice vertex name: " + name);
  std::vector<int> p;
  std::stringstream ss(name.substr(1, name.size() - 2));
  std::string tok;
  while (std::getline(ss, tok, ',')) p.push_back(std::stoi(tok));
  if (static_cast<int>(p.size()) != dim)
    throw std::invalid_argument("lattice vertex has wrong dimension: " + name);
  return p;
}

namespace {

using nlohmann::json;

GraphFamily family_from_json(const json& doc) {
  const std::string name = doc.at("family").get<std::string>();
  const json params = doc.value("params", json::object());
  if (name == "arms") return GraphFamily::arms(params.value("n", 3));
  if (name == "ladder") return GraphFamily::ladder();
  if (name == "rose") return GraphFamily::rose(params.value("n", 1));
  if (name == "lattice-walk") {
    int dim = params.at("d").get<int>();
    std::vector<std::pair<std::vector<int>, std::int64_t>> support;
    for (const auto& item : params.at("mu")) {
      std::vector<int> step;
      if (item.at("w").is_array())
        step = item.at("w").get<std::vector<int>>();
      else
        step = {item.at("w").get<int>()};
      support.emplace_back(std::move(step), item.at("count").get<std::int64_t>());
    }
    return GraphFamily::lattice_walk(LatticeWalk::make(dim, std::move(support)));
  }
  throw std::invalid_argument("unknown family: " + name);
}

GraphFamily explicit_from_json(const json& doc) {
  std::vector<VertexId> vs;
  for (const auto& v : doc.at("vertices")) vs.push_back(v.get<std::string>());
  std::vector<Edge> es;
  std::map<std::string, int> seen;  // src>dst occurrence counter for generated ids
  for (const auto& e : doc.at("edges")) {
    const std::string src = e.at("src").get<std::string>();
    const std::string dst = e.at("dst").get<std::string>();
    std::int64_t count = e.value("count", std::int64_t{1});
    if (count < 1) throw std::invalid_argument("edge multiplicity must be >= 1");
    if (e.contains("id")) {
      if (count != 1) throw std::invalid_argument("explicit edge id requires count 1");
      es.push_back(Edge{e.at("id").get<std::string>(), src, dst});
      continue;
    }
    for (std::int64_t j = 0; j < count; ++j) {
      const std::string base = src + ">" + dst;
      int k = ++seen[base];
      es.push_back(Edge{k == 1 ? base : base + "#" + std::to_string(k), src, dst});
    }
  }
  return GraphFamily::explicit_graph(FiniteGraph::make(std::move(vs), std::move(es)));
}

}  // namespace

GraphFamily load_graph_document(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad graph document: ") + e.what());
  }
  try {
    if (doc.contains("family")) return family_from_json(doc);
    if (doc.contains("vertices")) return explicit_from_json(doc);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad graph document: ") + e.what());
  }
  throw std::invalid_argument("graph document needs either \"family\" or \"vertices\"");
}

GraphFamily load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_graph_document(ss.str());
}

std::string graph_document(const FiniteGraph& g) {
  nlohmann::ordered_json doc;
  doc["vertices"] = g.vertex_ids();
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges())
    edges.push_back({{"id", e.id}, {"src", e.src}, {"dst", e.dst}});
  return doc.dump(2) + "\n";
}

}  // namespace kms
