#include "gradlab/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "gradlab/gridops.hpp"

namespace gradlab {

namespace {

bool metric_homogeneous(const EvolvingModel& model) {
  return model.kind == ModelKind::ConformalCircle || model.kind == ModelKind::ConformalTorus;
}

// Full second-order context at a node: chart derivatives of u and the metric
// package.  Loads only where every resolved axis has a clean stencil and the
// chart is regular.
struct TensorCtx {
  double u = 0.0;
  std::vector<double> du;      // chart partials, length n (collapsed axes 0)
  std::vector<double> hess_u;  // covariant Hessian components, n*n
  const MetricData* md = nullptr;
};

class CalcWorkspace {
 public:
  CalcWorkspace(const EvolvingModel& model, const GridSpec& grid)
      : model_(model), grid_(grid), st_(grid) {}

  const SpatialStencil& stencil() const { return st_; }

  void begin_row(double t) {
    t_ = t;
    if (metric_homogeneous(model_)) {
      std::vector<double> x(grid_.axes.size());
      for (std::size_t a = 0; a < x.size(); ++a) x[a] = grid_.axes[a].fixed;
      row_md_ = metric_data(model_, x, t_);
      has_row_md_ = true;
    } else {
      has_row_md_ = false;
    }
  }

  // Mask for tensor quantities and checks: clean stencils, regular chart,
  // outside the degenerate band.
  bool tensor_ok(int s) const {
    if (!st_.interior(s)) return false;
    const std::vector<double> x = grid_.point(s);
    return model_.in_chart(x) && !model_.in_band(x);
  }

  bool load(std::span<const double> slice, int s, TensorCtx& ctx) {
    if (!tensor_ok(s)) return false;
    const std::vector<double> x = grid_.point(s);
    const int n = model_.n;
    if (has_row_md_) {
      ctx.md = &row_md_;
    } else {
      node_md_ = metric_data(model_, x, t_);
      ctx.md = &node_md_;
    }
    ctx.u = slice[s];
    ctx.du.assign(n, 0.0);
    ctx.hess_u.assign(static_cast<std::size_t>(n) * n, 0.0);
    const auto& res = st_.res;
    for (std::size_t r = 0; r < res.size(); ++r) ctx.du[res[r]] = st_.d1(slice, s, static_cast<int>(r));
    // second chart derivatives over resolved axes; cross terms only between
    // resolved axes (collapsed partials vanish)
    for (std::size_t ra = 0; ra < res.size(); ++ra) {
      for (std::size_t rb = ra; rb < res.size(); ++rb) {
        const double v = (ra == rb) ? st_.d2(slice, s, static_cast<int>(ra))
                                    : st_.cross(slice, s, static_cast<int>(ra),
                                                static_cast<int>(rb));
        ctx.hess_u[static_cast<std::size_t>(res[ra]) * n + res[rb]] = v;
        ctx.hess_u[static_cast<std::size_t>(res[rb]) * n + res[ra]] = v;
      }
    }
    // covariant correction: Hess_ij = d_i d_j u - Gamma^c_ij d_c u
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double corr = 0.0;
        for (int c = 0; c < n; ++c) corr += ctx.md->gamma(c, i, j) * ctx.du[c];
        ctx.hess_u[static_cast<std::size_t>(i) * n + j] -= corr;
      }
    }
    return true;
  }

  double t() const { return t_; }

 private:
  const EvolvingModel& model_;
  const GridSpec& grid_;
  SpatialStencil st_;
  double t_ = 0.0;
  bool has_row_md_ = false;
  MetricData row_md_, node_md_;
};

// Quantities derived from a tensor context.
struct FQuantities {
  double grad_sq = 0.0;    // |grad u|^2
  double q = 0.0;          // |grad u|^2 / u
  double lap_u = 0.0;      // Lap u
  double lap_f = 0.0;      // Lap log u
  double hess_f_sq = 0.0;  // |Hess log u|^2
  double dtg_hess_f = 0.0; // <dt g, Hess log u>
};

FQuantities f_quantities(const TensorCtx& ctx, int n) {
  FQuantities out;
  const MetricData& md = *ctx.md;
  for (int i = 0; i < n; ++i) out.grad_sq += md.ginv(i, i) * sq(ctx.du[i]);
  out.q = out.grad_sq / ctx.u;
  for (int i = 0; i < n; ++i)
    out.lap_u += md.ginv(i, i) * ctx.hess_u[static_cast<std::size_t>(i) * n + i];
  // Hess f = Hess u / u - (du x du) / u^2 with f = log u
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double hf = ctx.hess_u[static_cast<std::size_t>(i) * n + j] / ctx.u -
                        ctx.du[i] * ctx.du[j] / sq(ctx.u);
      out.hess_f_sq += md.ginv(i, i) * md.ginv(j, j) * sq(hf);
      if (i == j) out.lap_f += md.ginv(i, i) * hf;
      out.dtg_hess_f += md.ginv(i, i) * md.ginv(j, j) *
                        md.dt_g[static_cast<std::size_t>(i) * n + j] * hf;
    }
  }
  return out;
}

QuantityField make_field(const ScalarField& src, const std::string& name) {
  QuantityField f;
  f.name = name;
  f.grid = src.grid;
  f.values.assign(static_cast<std::size_t>(src.grid.size()), 0.0);
  f.valid.assign(static_cast<std::size_t>(src.grid.size()), 0);
  return f;
}

std::span<const double> row(const ScalarField& f, int j) {
  const int ns = f.grid.spatial_size();
  return std::span<const double>(f.values.data() + static_cast<std::size_t>(j) * ns, ns);
}

std::span<const double> row_of(const std::vector<double>& v, const GridSpec& g, int j) {
  const int ns = g.spatial_size();
  return std::span<const double>(v.data() + static_cast<std::size_t>(j) * ns, ns);
}

}  // namespace

FieldStats field_stats(const QuantityField& f) {
  FieldStats st;
  st.min_value = std::numeric_limits<double>::infinity();
  st.max_value = -std::numeric_limits<double>::infinity();
  const int ns = f.grid.spatial_size();
  for (int j = 0; j < f.grid.nt; ++j) {
    for (int s = 0; s < ns; ++s) {
      if (!f.ok(j, s)) continue;
      const double v = f.at(j, s);
      ++st.valid_count;
      st.min_value = std::min(st.min_value, v);
      st.max_value = std::max(st.max_value, v);
      if (std::abs(v) > st.sup_abs) {
        st.sup_abs = std::abs(v);
        st.worst_row = j;
        st.worst_node = s;
      }
    }
  }
  if (st.valid_count == 0) {
    st.min_value = 0.0;
    st.max_value = 0.0;
  }
  return st;
}

double mesh_h(const GridSpec& grid) {
  double h = 0.0;
  for (const auto& ax : grid.axes)
    if (!ax.collapsed) h = std::max(h, ax.step());
  return h;
}

QuantityField differentiate(const ScalarField& field, const std::string& name) {
  const GridSpec& grid = field.grid;
  const EvolvingModel& model = field.model;
  QuantityField out = make_field(field, name);
  const int ns = grid.spatial_size();
  CalcWorkspace ws(model, grid);

  const bool scalar_quantity =
      name == "grad_sq" || name == "laplacian" || name == "q" || name == "u_log_u";
  const bool tensor_quantity = name == "lap_f" || name == "hess_f_norm_sq";
  if (!scalar_quantity && !tensor_quantity)
    throw ConfigError("unsupported quantity name: " + name);

  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    ws.begin_row(t);
    const std::span<const double> slice = row(field, j);
    for (int s = 0; s < ns; ++s) {
      const int node = grid.node(j, s);
      if (name == "u_log_u") {
        const double u = slice[s];
        out.values[node] = u * std::log(u);
        out.valid[node] = 1;
        continue;
      }
      if (scalar_quantity) {
        double g2 = 0.0, lap = 0.0;
        const bool ok_g = grad_sq_scalar(model, ws.stencil(), slice, s, t, g2);
        if (!ok_g) continue;
        if (name == "grad_sq") {
          out.values[node] = g2;
          out.valid[node] = 1;
        } else if (name == "q") {
          out.values[node] = g2 / slice[s];
          out.valid[node] = 1;
        } else {  // laplacian
          if (!laplacian_scalar(model, ws.stencil(), slice, s, t, lap)) continue;
          out.values[node] = lap;
          out.valid[node] = 1;
        }
        continue;
      }
      TensorCtx ctx;
      if (!ws.load(slice, s, ctx)) continue;
      const FQuantities fq = f_quantities(ctx, model.n);
      out.values[node] = name == "lap_f" ? fq.lap_f : fq.hess_f_sq;
      out.valid[node] = 1;
    }
  }
  return out;
}

IdentityResiduals identity_residuals(const ScalarField& field) {
  const GridSpec& grid = field.grid;
  const EvolvingModel& model = field.model;
  if (grid.nt < 3) throw DomainError("grid too coarse for time stencils");
  const int ns = grid.spatial_size();

  // Stage the derived arrays first: the identities apply space-time stencils
  // to u log u and to q themselves.
  QuantityField ulogu = differentiate(field, "u_log_u");
  QuantityField qf = differentiate(field, "q");

  IdentityResiduals out{make_field(field, "entropy_identity"),
                        make_field(field, "q_evolution_identity")};
  CalcWorkspace ws(model, grid);
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    ws.begin_row(t);
    const std::span<const double> uslice = row(field, j);
    const std::span<const double> wslice = row_of(ulogu.values, grid, j);
    const std::span<const double> qslice = row_of(qf.values, grid, j);
    const double rt = model.rt_factor(t);
    for (int s = 0; s < ns; ++s) {
      const int node = grid.node(j, s);
      TensorCtx ctx;
      if (!ws.load(uslice, s, ctx)) continue;
      const FQuantities fq = f_quantities(ctx, model.n);

      double lap_w = 0.0;
      if (!laplacian_scalar(model, ws.stencil(), wslice, s, t, lap_w)) continue;
      const double dt_w = time_deriv(grid, ulogu.values, j, s);
      out.entropy.values[node] = 0.5 * lap_w - dt_w - 0.5 * fq.q;
      out.entropy.valid[node] = 1;

      double lap_q = 0.0;
      if (!laplacian_scalar(model, ws.stencil(), qslice, s, t, lap_q)) continue;
      const double dt_q = time_deriv(grid, qf.values, j, s);
      const double rhs = ctx.u * fq.hess_f_sq + rt * fq.q;
      out.q_evolution.values[node] = 0.5 * lap_q - dt_q - rhs;
      out.q_evolution.valid[node] = 1;
    }
  }
  return out;
}

QuantityField hessian_bound_check(const ScalarField& field) {
  const GridSpec& grid = field.grid;
  const EvolvingModel& model = field.model;
  QuantityField out = make_field(field, "hessian_trace_gap");
  const int ns = grid.spatial_size();
  CalcWorkspace ws(model, grid);
  for (int j = 0; j < grid.nt; ++j) {
    ws.begin_row(grid.time(j));
    const std::span<const double> slice = row(field, j);
    for (int s = 0; s < ns; ++s) {
      TensorCtx ctx;
      if (!ws.load(slice, s, ctx)) continue;
      const FQuantities fq = f_quantities(ctx, model.n);
      const int node = grid.node(j, s);
      out.values[node] = ctx.u * fq.hess_f_sq - ctx.u / model.n * sq(fq.lap_f);
      out.valid[node] = 1;
    }
  }
  return out;
}

QuantityField rt_lower_residual(const ScalarField& field, const KProfile& k) {
  const GridSpec& grid = field.grid;
  const EvolvingModel& model = field.model;
  QuantityField out = make_field(field, "rt_lower_residual");
  QuantityField qf = differentiate(field, "q");
  const int ns = grid.spatial_size();
  CalcWorkspace ws(model, grid);
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    ws.begin_row(t);
    const std::span<const double> qslice = row_of(qf.values, grid, j);
    for (int s = 0; s < ns; ++s) {
      if (!ws.tensor_ok(s)) continue;
      double lap_q = 0.0;
      if (!laplacian_scalar(model, ws.stencil(), qslice, s, t, lap_q)) continue;
      const double dt_q = time_deriv(grid, qf.values, j, s);
      const int node = grid.node(j, s);
      out.values[node] = 0.5 * lap_q - dt_q + k(t) * qf.values[node];
      out.valid[node] = 1;
    }
  }
  return out;
}

QuantityField hess_dtg_inequality_check(const ScalarField& field, double alpha,
                                        double a, double b, const BoundSet& bounds) {
  if (!(a > 0.0) || !(b > 0.0) || std::abs(a + b - 1.0 / alpha) > 1e-12)
    throw ConfigError("hess_dtg split requires a, b > 0 with a + b = 1/alpha");
  const GridSpec& grid = field.grid;
  const EvolvingModel& model = field.model;
  QuantityField out = make_field(field, "hess_dtg_slack");
  const int ns = grid.spatial_size();
  const double kmax2 = sq(std::max(bounds.k2, bounds.k3));
  CalcWorkspace ws(model, grid);
  for (int j = 0; j < grid.nt; ++j) {
    ws.begin_row(grid.time(j));
    const std::span<const double> slice = row(field, j);
    for (int s = 0; s < ns; ++s) {
      TensorCtx ctx;
      if (!ws.load(slice, s, ctx)) continue;
      const FQuantities fq = f_quantities(ctx, model.n);
      const int node = grid.node(j, s);
      out.values[node] = fq.hess_f_sq - alpha * fq.dtg_hess_f -
                         a * alpha / model.n * sq(fq.lap_f) +
                         alpha * model.n / (4.0 * b) * kmax2;
      out.valid[node] = 1;
    }
  }
  return out;
}

QuantityField laplacian_variation_check(const EvolvingModel& model,
                                        const ScalarField& field) {
  const GridSpec& grid = field.grid;
  QuantityField out = make_field(field, "laplacian_variation");
  const int ns = grid.spatial_size();
  const double dt = grid.dt();
  CalcWorkspace ws(model, grid);
  SpatialStencil st(grid);
  for (int j = 0; j < grid.nt; ++j) {
    const double t = grid.time(j);
    ws.begin_row(t);
    const std::span<const double> slice = row(field, j);
    // operator variation at frozen v: difference Lap_{g_s} v in s around t
    const bool lo_edge = t - dt < 0.0;
    const bool hi_edge = t + dt > model.horizon;
    for (int s = 0; s < ns; ++s) {
      TensorCtx ctx;
      if (!ws.load(slice, s, ctx)) continue;
      double lap_var = 0.0;
      auto lap_at = [&](double ts) {
        // rounding can push t +/- dt an ulp past the window ends
        ts = std::clamp(ts, 0.0, model.horizon);
        double v = 0.0;
        if (!laplacian_scalar(model, st, slice, s, ts, v))
          throw DomainError("operator variation hit a masked node");
        return v;
      };
      if (lo_edge) {
        lap_var = (-3.0 * lap_at(t) + 4.0 * lap_at(t + dt) - lap_at(t + 2.0 * dt)) /
                  (2.0 * dt);
      } else if (hi_edge) {
        lap_var = (3.0 * lap_at(t) - 4.0 * lap_at(t - dt) + lap_at(t - 2.0 * dt)) /
                  (2.0 * dt);
      } else {
        lap_var = (lap_at(t + dt) - lap_at(t - dt)) / (2.0 * dt);
      }
      // <dt g, Hess v> with both indices raised by g_inv
      const MetricData& md = *ctx.md;
      double dtg_hess = 0.0;
      const int n = model.n;
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
          dtg_hess += md.ginv(i, i) * md.ginv(l, l) *
                      md.dt_g[static_cast<std::size_t>(i) * n + l] *
                      ctx.hess_u[static_cast<std::size_t>(i) * n + l];
      const int node = grid.node(j, s);
      out.values[node] = lap_var + dtg_hess;  // + 0 pairing term (see header)
      out.valid[node] = 1;
    }
  }
  return out;
}

}  // namespace gradlab
