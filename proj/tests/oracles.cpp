#include "oracles.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace serpent::oracle {

BodyPoints fk_by_transforms(const RobotSpec& spec, const Configuration& c) {
  const Vec3 f = spec.base_forward.normalized();
  Vec3 up = (Vec3::UnitZ() - f.z() * f);
  if (up.norm() < 1e-9) up = Vec3::UnitX() - f.x() * f;
  up.normalize();
  Eigen::Matrix3d base;
  base << f, up.cross(f), up;

  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translate(spec.base_position);
  t.rotate(base);
  t.translate(Vec3(c.l(), 0, 0));
  BodyPoints out{t.translation()};
  for (int k = 0; k < spec.num_units; ++k)
    for (int s = 0; s < spec.subunits_per_unit; ++s) {
      t.rotate(Eigen::AngleAxisd(-c.pitch(k), Vec3::UnitY()));
      t.rotate(Eigen::AngleAxisd(c.yaw(k), Vec3::UnitZ()));
      t.translate(Vec3(spec.subunit_length, 0, 0));
      out.push_back(t.translation());
    }
  return out;
}

Word crossings(std::span<const Beam> beams, const Vec2& a, const Vec2& b) {
  std::vector<std::pair<double, SignedLetter>> hits;
  for (const Beam& beam : beams) {
    const double x = beam.anchor.x();
    const int side_a = a.x() < x ? 0 : 1;
    const int side_b = b.x() < x ? 0 : 1;
    if (side_a == side_b) continue;
    // Parameter along a -> b where the segment meets the beam line.
    const double s = (x - a.x()) / (b.x() - a.x());
    const double z = (1 - s) * a.y() + s * b.y();
    if (z >= beam.anchor.y() && z <= beam.top) hits.push_back({s, {beam.letter, side_b == 1 ? 1 : -1}});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const auto& p, const auto& q) {
    return p.first < q.first || (p.first == q.first && p.second.letter < q.second.letter);
  });
  Word out;
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

namespace {

Word reduce_naive(Word w) {
  // Repeatedly removes the first cancelling pair.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i].letter == w[i + 1].letter && w[i].sign == -w[i + 1].sign) {
        w.erase(w.begin() + i, w.begin() + i + 2);
        changed = true;
        break;
      }
  }
  return w;
}

}  // namespace

std::vector<Word> enumerate_reduced_words(int letters, int max_len) {
  std::vector<Word> out{{}};
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int l = 0; l < letters; ++l)
        for (int s : {1, -1}) {
          Word w = out[i];
          if (!w.empty() && w.back().letter == l && w.back().sign == -s) continue;
          w.push_back({l, s});
          out.push_back(std::move(w));
        }
    begin = end;
  }
  return out;
}

ProductGraphDistances brute_force_homotopy(const Environment& env, std::span<const Beam> beams, const Vec2& goal,
                                           double resolution, int max_len) {
  ProductGraphDistances r;
  const double x0 = env.bounds.x.lo, z0 = env.bounds.z.lo;
  r.nx = static_cast<int>(std::ceil(env.bounds.x.length() / resolution - 1e-9));
  r.nz = static_cast<int>(std::ceil(env.bounds.z.length() / resolution - 1e-9));
  const int cells = r.nx * r.nz;
  auto center = [&](int i, int k) { return Vec2(x0 + (i + 0.5) * resolution, z0 + (k + 0.5) * resolution); };
  std::vector<char> free(cells);
  for (int k = 0; k < r.nz; ++k)
    for (int i = 0; i < r.nx; ++i) {
      const Vec2 c = center(i, k);
      bool inside = false;
      for (const Blade& b : env.blades)
        inside |= c.x() >= b.x.lo && c.x() <= b.x.hi && c.y() >= b.z.lo && c.y() <= b.z.hi;
      free[k * r.nx + i] = !inside;
    }

  r.words = enumerate_reduced_words(static_cast<int>(beams.size()), max_len);
  std::map<Word, int> word_id;
  for (std::size_t i = 0; i < r.words.size(); ++i) word_id.emplace(r.words[i], static_cast<int>(i));
  const std::size_t nodes = r.words.size() * cells;

  // Edge (v, W) -> (u, reduce(c^-1 W)) for every free 8-neighbor u, where c
  // lists the crossings of v -> u: a path from v with signature W continues
  // from u with the rest of the word. Stored reversed for the search from the
  // goal node.
  std::vector<std::vector<std::pair<int, double>>> reverse(nodes);
  const double diag = resolution * std::numbers::sqrt2;
  for (int k = 0; k < r.nz; ++k)
    for (int i = 0; i < r.nx; ++i) {
      const int v = k * r.nx + i;
      if (!free[v]) continue;
      for (int dk = -1; dk <= 1; ++dk)
        for (int di = -1; di <= 1; ++di) {
          if (!di && !dk) continue;
          const int ui = i + di, uk = k + dk;
          if (ui < 0 || uk < 0 || ui >= r.nx || uk >= r.nz) continue;
          const int u = uk * r.nx + ui;
          if (!free[u]) continue;
          const Word c = crossings(beams, center(i, k), center(ui, uk));
          Word inv;
          for (auto it = c.rbegin(); it != c.rend(); ++it) inv.push_back({it->letter, -it->sign});
          const double w = (di && dk) ? diag : resolution;
          for (std::size_t wi = 0; wi < r.words.size(); ++wi) {
            Word rest = inv;
            rest.insert(rest.end(), r.words[wi].begin(), r.words[wi].end());
            auto it = word_id.find(reduce_naive(rest));
            if (it == word_id.end()) continue;
            reverse[static_cast<std::size_t>(it->second) * cells + u].push_back(
                {static_cast<int>(wi * cells + v), w});
            ++r.edges;
          }
        }
    }

  const int gi = std::min(r.nx - 1, static_cast<int>(std::floor((goal.x() - x0) / resolution)));
  const int gk = std::min(r.nz - 1, static_cast<int>(std::floor((goal.y() - z0) / resolution)));
  const int goal_node = gk * r.nx + gi;  // empty word has index 0
  r.dist.assign(nodes, kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  r.dist[goal_node] = 0.0;
  open.push({0.0, goal_node});
  while (!open.empty()) {
    const auto [d, n] = open.top();
    open.pop();
    if (d > r.dist[n]) continue;
    for (const auto& [m, w] : reverse[n])
      if (d + w < r.dist[m]) {
        r.dist[m] = d + w;
        open.push({d + w, m});
      }
  }
  return r;
}

std::vector<GridFixture> homotopy_grid_fixtures() {
  auto bounds = [](double w, double h) { return Box3{{0, w}, {-0.2, 0.2}, {0, h}}; };
  std::vector<GridFixture> out;
  out.push_back({"one_blade", {bounds(0.5, 0.5), {{{0.2, 0.26}, {{0.1, 0.3}}}}}, {0.45, 0.25}, 0.02});
  out.push_back({"stack_of_two",
                 {bounds(0.6, 0.6), {{{0.24, 0.32}, {{0.06, 0.22}, {0.34, 0.5}}}}},
                 {0.53, 0.31},
                 0.02});
  out.push_back({"two_columns",
                 {bounds(0.6, 0.5), {{{0.14, 0.2}, {{0.12, 0.3}}}, {{0.36, 0.42}, {{0.2, 0.4}}}}},
                 {0.55, 0.05},
                 0.02});
  out.push_back({"three_columns",
                 {bounds(0.5, 0.5),
                  {{{0.1, 0.16}, {{0.2, 0.36}}}, {{0.22, 0.28}, {{0.06, 0.2}}}, {{0.34, 0.4}, {{0.24, 0.42}}}}},
                 {0.47, 0.13},
                 0.025});
  out.push_back({"two_by_two",
                 {bounds(0.5, 0.5),
                  {{{0.12, 0.18}, {{0.08, 0.2}, {0.3, 0.42}}}, {{0.3, 0.36}, {{0.1, 0.22}, {0.32, 0.44}}}}},
                 {0.45, 0.27},
                 0.025});
  out.push_back({"goal_between_columns",
                 {bounds(0.6, 0.6), {{{0.1, 0.2}, {{0.2, 0.4}}}, {{0.4, 0.5}, {{0.1, 0.3}, {0.38, 0.5}}}}},
                 {0.3, 0.3},
                 0.02});
  return out;
}

FigureFixture figure_fixture() {
  BladeArraySpec spec;
  spec.bounds = {{0, 1}, {-0.2, 0.2}, {0, 1}};
  spec.columns = {{{0.2, 0.3}, {{0.7, 0.9}}}, {{0.45, 0.55}, {{0.2, 0.4}, {0.55, 0.75}}}, {{0.7, 0.8}, {{0.1, 0.3}}}};
  FigureFixture f;
  f.env = build_environment(spec);
  f.beams = place_beams(f.env);
  f.tau1 = {{0.05, 0.5}, {0.35, 0.6}, {0.42, 0.82}, {0.58, 0.82}, {0.65, 0.6}, {0.75, 0.45}, {0.95, 0.5}};
  f.tau2 = {{0.05, 0.5}, {0.35, 0.3}, {0.42, 0.12}, {0.58, 0.12}, {0.65, 0.4}, {0.75, 0.45}, {0.95, 0.5}};
  return f;
}

bool triangle_hits_rect(const Vec2& a, const Vec2& b, const Vec2& c, const Interval& x, const Interval& z) {
  const Vec2 tri[3] = {a, b, c};
  const Vec2 rect[4] = {{x.lo, z.lo}, {x.hi, z.lo}, {x.hi, z.hi}, {x.lo, z.hi}};
  auto separated = [&](const Vec2& axis) {
    double t_lo = kInf, t_hi = -kInf, r_lo = kInf, r_hi = -kInf;
    for (const Vec2& p : tri) {
      t_lo = std::min(t_lo, axis.dot(p));
      t_hi = std::max(t_hi, axis.dot(p));
    }
    for (const Vec2& p : rect) {
      r_lo = std::min(r_lo, axis.dot(p));
      r_hi = std::max(r_hi, axis.dot(p));
    }
    return t_hi < r_lo || r_hi < t_lo;
  };
  if (separated({1, 0}) || separated({0, 1})) return false;
  for (int i = 0; i < 3; ++i) {
    const Vec2 e = tri[(i + 1) % 3] - tri[i];
    if (e.squaredNorm() > 0 && separated({-e.y(), e.x()})) return false;
  }
  return true;
}

namespace {

bool hits_any(const Environment& env, const Vec2& a, const Vec2& b, const Vec2& c) {
  for (const Blade& bl : env.blades)
    if (triangle_hits_rect(a, b, c, bl.x, bl.z)) return true;
  return false;
}

}  // namespace

DeformationStats deformation_invariance(const Environment& env, std::span<const Beam> beams, int cases,
                                        int deformations_per_case, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Interval& bx = env.bounds.x;
  const Interval& bz = env.bounds.z;
  std::uniform_real_distribution<double> ux(bx.lo, bx.hi), uz(bz.lo, bz.hi), step(-0.15, 0.15);
  std::uniform_int_distribution<int> vertices(4, 9);
  DeformationStats st;
  while (st.cases < cases) {
    const int n = vertices(rng);
    std::vector<Vec2> pts;
    for (int tries = 0; static_cast<int>(pts.size()) < n && tries < 1000; ++tries) {
      const Vec2 p(ux(rng), uz(rng));
      if (!pts.empty() && hits_any(env, pts.back(), p, p)) continue;
      pts.push_back(p);
    }
    if (static_cast<int>(pts.size()) < n) continue;
    ++st.cases;
    const HSignature base = signature_of_polyline(beams, pts);
    st.nonempty += !base.empty();
    for (int d = 0; d < deformations_per_case;) {
      std::uniform_int_distribution<int> pick(1, n - 2);
      const int i = pick(rng);
      const Vec2 moved = pts[i] + Vec2(step(rng), step(rng));
      if (!bx.contains(moved.x()) || !bz.contains(moved.y())) continue;
      if (hits_any(env, pts[i - 1], pts[i], moved) || hits_any(env, pts[i], moved, pts[i + 1])) continue;
      pts[i] = moved;
      ++d;
      ++st.deformations;
      if (signature_of_polyline(beams, pts) != base) ++st.violations;
    }
  }
  return st;
}

StubGenerator::StubGenerator(RobotSpec spec, double delta_rev, double delta_pris, double reach)
    : spec_(std::move(spec)), delta_rev_(delta_rev), delta_pris_(delta_pris), reach_(reach) {}

OptResult StubGenerator::operator()(const Configuration& from, const Vec3& target, std::uint64_t) {
  ++calls_;
  const int dof = from.dof();
  auto step = [&](int j) { return j == 0 ? delta_pris_ : delta_rev_; };
  OptResult best;
  best.candidate = from;
  best.objective_value = kInf;
  auto consider = [&](const Configuration& c) {
    if (!within_limits(spec_, c)) return;
    const double d = (end_effector(spec_, c) - target).norm();
    ++best.evaluations;
    if (d < best.objective_value) {
      best.objective_value = d;
      best.candidate = c;
    }
  };
  for (int i = 0; i < dof; ++i)
    for (int si : {1, -1}) {
      Configuration c = from;
      c[i] += si * step(i);
      consider(c);
      for (int j = i + 1; j < dof; ++j)
        for (int sj : {1, -1}) {
          Configuration c2 = c;
          c2[j] += sj * step(j);
          consider(c2);
        }
    }
  best.converged = best.objective_value <= reach_;
  return best;
}

namespace {

RobotSpec stub_robot() {
  RobotSpec r;
  r.num_units = 2;
  r.subunits_per_unit = 3;
  r.subunit_length = 0.05;
  r.body_radius = 0.01;
  r.pitch_limit = 0.375;
  r.yaw_limit = 0.375;
  r.prismatic_range = {0.0, 0.5};
  return r;
}

PlannerConfig stub_config() {
  PlannerConfig pc;
  pc.heuristic_weight = 1.0;
  pc.heuristic = HeuristicMode::euclidean;
  pc.use_opt = true;
  pc.use_lazy = true;
  pc.use_dts = false;
  pc.stagnation_window = 1;  // every expansion after the first attaches optimization actions
  pc.ee_step = 0.06;
  pc.goal_tolerance = 0.02;
  pc.delta_rev = 0.125;
  pc.delta_pris = 0.03125;
  pc.timeout = 60.0;
  return pc;
}

Vec3 tip_of(const RobotSpec& r, std::vector<double> q) { return end_effector(r, Configuration(std::move(q))); }

}  // namespace

std::vector<SearchFixture> stub_fixtures() {
  const RobotSpec robot = stub_robot();
  const Box3 bounds{{-0.1, 1.0}, {-0.3, 0.3}, {-0.4, 0.4}};
  struct Def {
    std::string name;
    std::vector<ColumnSpec> columns;
    std::vector<double> witness;
  };
  const std::vector<Def> defs = {
      {"open_forward", {}, {0.25, 0.125, 0, 0.25, 0}},
      {"open_yaw", {}, {0.1875, 0, 0.25, 0, -0.125}},
      {"open_curl", {}, {0.125, -0.25, 0.125, -0.375, 0}},
      {"blade_below", {{{0.55, 0.6}, {{-0.4, -0.08}}}}, {0.3125, 0.125, 0, 0.25, 0.125}},
      {"blade_above", {{{0.5, 0.56}, {{0.08, 0.4}}}}, {0.25, -0.125, 0.125, -0.25, 0}},
      {"slot", {{{0.62, 0.66}, {{-0.4, -0.06}, {0.06, 0.4}}}}, {0.375, 0, 0, 0, 0.125}},
      {"two_columns",
       {{{0.45, 0.5}, {{-0.4, -0.1}}}, {{0.7, 0.75}, {{0.1, 0.4}}}},
       {0.3125, 0.125, -0.125, -0.125, 0}},
      {"side_reach", {{{0.6, 0.65}, {{-0.05, 0.05}}}}, {0.3125, 0, 0.375, 0, 0.25}},
      {"low_target", {{{0.5, 0.55}, {{0.02, 0.4}}}}, {0.1875, -0.25, 0, -0.25, 0.125}},
      {"wall_gap", {{{0.58, 0.62}, {{-0.4, -0.1}, {0.1, 0.4}}}}, {0.4375, 0, 0.125, 0.125, -0.125}},
      {"trap", {{{0.42, 0.5}, {{-0.03, 0.4}}}}, {0.125, -0.375, 0, 0.375, 0}},
  };
  std::vector<SearchFixture> out;
  for (const Def& d : defs) {
    SearchFixture f;
    f.name = d.name;
    f.world = make_world({bounds, d.columns}, robot, 0.01);
    f.start = Configuration(robot.num_units);
    f.goal.position = tip_of(robot, d.witness);
    f.pc = stub_config();
    out.push_back(std::move(f));
  }
  return out;
}

StubGenerator make_stub(const SearchFixture& f) {
  return StubGenerator(f.world.robot, f.pc.delta_rev, f.pc.delta_pris, f.pc.effective_reach_tolerance());
}

SearchFixture micro_instance() {
  RobotSpec r;
  r.num_units = 1;
  r.subunits_per_unit = 4;
  r.subunit_length = 0.05;
  r.body_radius = 0.01;
  r.pitch_limit = 0.5;
  r.yaw_limit = 0.5;
  r.prismatic_range = {0.0, 0.5};
  SearchFixture f;
  f.name = "micro";
  f.world = make_world({{{-0.1, 1.0}, {-0.3, 0.3}, {-0.6, 0.4}}, {{{0.5, 0.55}, {{-0.6, -0.05}}}}}, r, 0.01);
  f.start = Configuration(1);
  f.goal.position = tip_of(r, {0.3125, -0.375, 0.125});
  f.pc.heuristic = HeuristicMode::euclidean;
  f.pc.use_opt = false;
  f.pc.use_dts = false;
  f.pc.goal_tolerance = 0.01;
  f.pc.delta_rev = 0.0625;
  f.pc.delta_pris = 0.03125;
  f.pc.timeout = 60.0;
  return f;
}

ExhaustiveResult exhaustive_optimum(const SearchFixture& f) {
  const RobotSpec& spec = f.world.robot;
  const int dof = spec.dof();
  auto step = [&](int j) { return j == 0 ? f.pc.delta_pris : f.pc.delta_rev; };
  auto config_of = [&](const std::vector<int>& key) {
    Configuration c = f.start;
    for (int j = 0; j < dof; ++j) c[j] = f.start[j] + key[j] * step(j);
    return c;
  };
  std::map<std::vector<int>, double> dist;
  std::map<std::vector<int>, bool> done;
  using Item = std::pair<double, std::vector<int>>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  const std::vector<int> origin(dof, 0);
  dist[origin] = 0.0;
  open.push({0.0, origin});
  ExhaustiveResult out;
  while (!open.empty()) {
    auto [d, key] = open.top();
    open.pop();
    if (done[key]) continue;
    done[key] = true;
    ++out.settled;
    const Configuration c = config_of(key);
    if (goal_check(spec, c, f.goal, f.pc.goal_tolerance, f.pc.goal_axis_tolerance)) {
      out.cost = d;
      return out;
    }
    for (int j = 0; j < dof; ++j)
      for (int s : {1, -1}) {
        std::vector<int> nk = key;
        nk[j] += s;
        const Configuration n = config_of(nk);
        if (!within_limits(spec, n)) continue;
        if (done.count(nk) && done[nk]) continue;
        if (!is_valid_transition(spec, f.world.field, c, n, f.pc.interpolation)) continue;
        const double nd = d + (end_effector(spec, c) - end_effector(spec, n)).norm();
        auto it = dist.find(nk);
        if (it == dist.end() || nd < it->second) {
          dist[nk] = nd;
          open.push({nd, nk});
        }
      }
  }
  return out;
}

}  // namespace serpent::oracle
