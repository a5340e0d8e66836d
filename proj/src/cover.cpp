#include "celab/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "celab/parallel.hpp"

namespace celab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinStepFraction = 1.0 / 1048576.0; // 2^-20 of a loop
constexpr double kClosureTol = 1e-8;

struct Vec3 {
    double x, y, z;
};

Vec3 to_vec3(const SpherePoint& p) {
    auto a = embed3(p);
    return {a[0], a[1], a[2]};
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 scale(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }

double point_segment_dist(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = sub(b, a);
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(sub(p, a), ab) / len2, 0.0, 1.0) : 0.0;
    Vec3 q = {a.x + t * ab.x, a.y + t * ab.y, a.z + t * ab.z};
    return norm(sub(p, q));
}

// Advance the whole preimage chain to the new base point; false means some
// level was ambiguous (two nearest candidates within 3x) and the step must shrink.
bool advance_chain(const RationalMap& f, std::vector<SpherePoint>& chain,
                   const SpherePoint& base) {
    std::vector<SpherePoint> next(chain.size());
    next[0] = base;
    for (std::size_t k = 1; k < chain.size(); ++k) {
        auto cands = preimages(f, next[k - 1]);
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = std::numeric_limits<double>::infinity();
        SpherePoint best;
        for (const auto& [p, mult] : cands) {
            double d = chordal_dist(p, chain[k]);
            for (int c = 0; c < mult; ++c) {
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                    best = p;
                } else if (d < d2) {
                    d2 = d;
                }
            }
        }
        if (!(d2 >= 3.0 * d1)) return false;
        next[k] = best;
    }
    chain = std::move(next);
    return true;
}

struct CircleParam {
    ChartDisk cd;
    double theta0;

    SpherePoint at(double theta) const {
        Complex w = cd.center + cd.radius * Complex(std::cos(theta0 + theta),
                                                    std::sin(theta0 + theta));
        return chart_to_sphere(w, cd.chart);
    }
};

bool radial_continue(const RationalMap& f, std::vector<SpherePoint>& chain,
                     const CircleParam& circle) {
    Complex p0, v0;
    try {
        p0 = sphere_to_chart(chain[0], circle.cd.chart);
    } catch (const DomainError&) {
        return false;
    }
    v0 = circle.cd.center +
         circle.cd.radius * Complex(std::cos(circle.theta0), std::sin(circle.theta0));
    double t = 0.0, h = 0.125;
    const double hmin = kMinStepFraction;
    while (t < 1.0) {
        double step = std::min(h, 1.0 - t);
        SpherePoint b = chart_to_sphere(p0 + (t + step) * (v0 - p0), circle.cd.chart);
        if (advance_chain(f, chain, b)) {
            t += step;
            h = std::min(h * 1.9, 0.125);
        } else {
            h = step / 2.0;
            if (h < hmin) return false;
        }
    }
    return true;
}

} // namespace

std::vector<LiftedCurve> lift_tower(const RationalMap& f, const ChordalDisk& disk,
                                    std::span<const SpherePoint> chain_in, int samples) {
    if (samples < 64) throw DomainError("lift_tower: samples >= 64 required");
    if (chain_in.size() < 2) throw DomainError("lift_tower: chain must have depth >= 1");
    const int n = static_cast<int>(chain_in.size()) - 1;

    if (chordal_dist(chain_in[0], disk.center) > disk.radius + 1e-9)
        throw DomainError("lift_tower: f^n(w) is not inside the base disk");
    for (int k = 1; k <= n; ++k) {
        if (chordal_dist(eval(f, chain_in[k]), chain_in[k - 1]) > 1e-6)
            throw DomainError("lift_tower: chain is not a consecutive preimage sequence");
    }

    ChartDisk cd = to_chart(disk);

    // Continue the chain from f^n(w) out to a boundary point; retry with
    // golden-angle shifted start angles if the radial path is degenerate.
    const double golden = 2.399963229728653;
    std::vector<SpherePoint> chain;
    CircleParam circle{cd, 0.0};
    bool started = false;
    for (int attempt = 0; attempt < 8 && !started; ++attempt) {
        circle.theta0 = attempt * golden;
        chain.assign(chain_in.begin(), chain_in.end());
        started = radial_continue(f, chain, circle);
    }
    if (!started)
        throw NumericError("lift_tower: could not continue the branch to the boundary circle");

    struct LevelRec {
        std::vector<SpherePoint> verts;
        SpherePoint start;
        bool closed = false;
        int loops = 0;
    };
    std::vector<LevelRec> rec(n + 1);
    for (int k = 1; k <= n; ++k) {
        rec[k].start = chain[k];
        rec[k].verts.push_back(chain[k]);
    }

    const double h0 = kTwoPi / samples;
    const double hmin = kTwoPi * kMinStepFraction;
    const double loop_cap = std::min(std::pow(double(f.degree()), double(n)), 1e7);
    const std::size_t vertex_budget = 8000000;
    double h = h0;
    int loop = 0;
    std::size_t total_vertices = 0;

    while (true) {
        double theta = 0.0;
        while (theta < kTwoPi) {
            double step = std::min(h, kTwoPi - theta);
            SpherePoint b = circle.at(loop * kTwoPi + theta + step);
            if (advance_chain(f, chain, b)) {
                theta += step;
                h = std::min(h * 1.9, h0);
                for (int k = 1; k <= n; ++k) {
                    if (!rec[k].closed) {
                        rec[k].verts.push_back(chain[k]);
                        ++total_vertices;
                    }
                }
                if (total_vertices > vertex_budget)
                    throw ResourceError("lift_tower: vertex budget exceeded");
            } else {
                h = step / 2.0;
                if (h < hmin)
                    throw NumericError(
                        "lift_tower: degenerate boundary (critical value on the circle), level " +
                        std::to_string(n));
            }
        }
        ++loop;
        for (int k = 1; k <= n; ++k) {
            if (!rec[k].closed && chordal_dist(chain[k], rec[k].start) < kClosureTol) {
                rec[k].closed = true;
                rec[k].loops = loop;
            }
        }
        if (rec[n].closed) break;
        if (loop >= loop_cap)
            throw NumericError("lift_tower: lift did not close after d^n loops (level " +
                               std::to_string(n) + ", loops " + std::to_string(loop) + ")");
    }
    for (int k = 1; k <= n; ++k) {
        if (!rec[k].closed)
            throw NumericError("lift_tower: inconsistent closure at level " + std::to_string(k));
    }

    std::vector<LiftedCurve> out;
    out.reserve(n);
    for (int k = 1; k <= n; ++k) {
        LiftedCurve c;
        c.vertices = std::move(rec[k].verts);
        c.level = k;
        c.base_center = disk.center;
        c.base_radius = disk.radius;
        c.base_preimage = chain_in[k];
        c.loops = rec[k].loops;
        out.push_back(std::move(c));
    }
    return out;
}

LiftedCurve lift_circle(const RationalMap& f, const ChordalDisk& disk, const SpherePoint& w,
                        int n, int samples) {
    if (n < 0) throw DomainError("lift_circle: n >= 0 required");
    if (n == 0) {
        if (samples < 64) throw DomainError("lift_circle: samples >= 64 required");
        ChartDisk cd = to_chart(disk);
        LiftedCurve c;
        c.level = 0;
        c.base_center = disk.center;
        c.base_radius = disk.radius;
        c.base_preimage = w;
        c.loops = 1;
        c.vertices.reserve(samples + 1);
        for (int i = 0; i <= samples; ++i) {
            double t = kTwoPi * i / samples;
            c.vertices.push_back(
                chart_to_sphere(cd.center + cd.radius * Complex(std::cos(t), std::sin(t)),
                                cd.chart));
        }
        return c;
    }
    std::vector<SpherePoint> chain(n + 1);
    chain[n] = w;
    for (int k = n; k-- > 0;) chain[k] = eval(f, chain[k + 1]);
    auto tower = lift_tower(f, disk, chain, samples);
    return std::move(tower.back());
}

namespace {

double exact_diameter(const std::vector<Vec3>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d2 = dot(sub(pts[i], pts[j]), sub(pts[i], pts[j]));
            if (d2 > best) best = d2;
        }
    return std::sqrt(best);
}

// Andrew monotone chain on chart points; returns hull indices.
std::vector<std::size_t> hull_indices(const std::vector<Complex>& pts) {
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].real() != pts[b].real()) return pts[a].real() < pts[b].real();
        return pts[a].imag() < pts[b].imag();
    });
    auto cross2 = [&](std::size_t o, std::size_t a, std::size_t b) {
        Complex oa = pts[a] - pts[o], ob = pts[b] - pts[o];
        return oa.real() * ob.imag() - oa.imag() * ob.real();
    };
    std::vector<std::size_t> hull;
    for (int pass = 0; pass < 2; ++pass) {
        std::size_t start = hull.size();
        for (std::size_t ii = 0; ii < idx.size(); ++ii) {
            std::size_t i = idx[pass == 0 ? ii : idx.size() - 1 - ii];
            while (hull.size() >= start + 2 &&
                   cross2(hull[hull.size() - 2], hull[hull.size() - 1], i) <= 0.0)
                hull.pop_back();
            hull.push_back(i);
        }
        hull.pop_back();
    }
    return hull;
}

} // namespace

double curve_diameter(const LiftedCurve& c) {
    const auto& v = c.vertices;
    if (v.size() < 2) return 0.0;

    if (v.size() <= 4096) {
        std::vector<Vec3> pts;
        pts.reserve(v.size());
        for (const auto& p : v) pts.push_back(to_vec3(p));
        return exact_diameter(pts);
    }

    // Chart hull path, valid while every chordal ball of diameter size around a
    // vertex is still a Euclidean disk in the chart (quasiconvexity certificate).
    for (Chart chart : {Chart::standard, Chart::inverted}) {
        std::vector<Complex> pts;
        pts.reserve(v.size());
        double maxmod = 0.0;
        bool representable = true;
        double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
        for (const auto& p : v) {
            if ((chart == Chart::standard && p.is_inf()) ||
                (chart == Chart::inverted && !p.is_inf() && p.value() == Complex(0, 0))) {
                representable = false;
                break;
            }
            Complex w = sphere_to_chart(p, chart);
            maxmod = std::max(maxmod, std::abs(w));
            xlo = std::min(xlo, w.real());
            xhi = std::max(xhi, w.real());
            ylo = std::min(ylo, w.imag());
            yhi = std::max(yhi, w.imag());
            pts.push_back(w);
        }
        if (!representable || maxmod > 1e8) continue;
        double bbox_diag = std::hypot(xhi - xlo, yhi - ylo);
        double upper = std::min(2.0, 2.0 * bbox_diag);
        double pole_clearance = 2.0 / std::hypot(1.0, maxmod);
        if (upper >= pole_clearance - 1e-12) continue;
        auto hull = hull_indices(pts);
        double best = 0.0;
        for (std::size_t i = 0; i < hull.size(); ++i)
            for (std::size_t j = i + 1; j < hull.size(); ++j)
                best = std::max(best,
                                chordal_dist(chart_to_sphere(pts[hull[i]], chart),
                                             chart_to_sphere(pts[hull[j]], chart)));
        return best;
    }

    std::vector<Vec3> pts;
    pts.reserve(v.size());
    for (const auto& p : v) pts.push_back(to_vec3(p));
    return exact_diameter(pts);
}

double curve_distance(const LiftedCurve& c, const SpherePoint& p) {
    Vec3 p3 = to_vec3(p);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
        best = std::min(best, point_segment_dist(p3, to_vec3(c.vertices[i]),
                                                 to_vec3(c.vertices[i + 1])));
    return best;
}

namespace {

// Raw winding of the curve around p: angle swept by the tangent-frame
// direction of the vertices as seen from p, in turns.
double winding_turns(const LiftedCurve& c, const SpherePoint& p) {
    Vec3 p3 = to_vec3(p);
    Vec3 seed = std::abs(p3.x) < 0.8 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 e1 = sub(seed, scale(p3, dot(seed, p3)));
    e1 = scale(e1, 1.0 / norm(e1));
    Vec3 e2 = cross(p3, e1);

    double total = 0.0;
    double prev = 0.0;
    bool have_prev = false;
    for (const auto& vert : c.vertices) {
        Vec3 v3 = to_vec3(vert);
        Vec3 t = sub(v3, scale(p3, dot(v3, p3)));
        double r = norm(t);
        if (r < 1e-12)
            throw NumericError("winding: curve passes through the query point or its antipode");
        double theta = std::atan2(dot(t, e2) / r, dot(t, e1) / r);
        if (have_prev) {
            double delta = theta - prev;
            while (delta > std::numbers::pi) delta -= kTwoPi;
            while (delta < -std::numbers::pi) delta += kTwoPi;
            total += delta;
        }
        prev = theta;
        have_prev = true;
    }
    return total / kTwoPi;
}

} // namespace

bool point_in_component(const LiftedCurve& c, const SpherePoint& p) {
    if (curve_distance(c, p) < 1e-9)
        throw NumericError("point_in_component: point lies on the boundary curve");
    double turns = winding_turns(c, p);
    long long w = std::llround(turns);
    if (std::abs(turns - double(w)) > 0.2)
        throw NumericError("point_in_component: ambiguous winding number");
    if (w != 0 && std::llabs(w) != c.loops)
        throw NumericError("point_in_component: winding inconsistent with covering degree");
    return w != 0;
}

std::vector<SpherePoint> julia_sample(const RationalMap& f, int count, std::uint64_t seed,
                                      int burnin) {
    if (count < 1) throw DomainError("julia_sample: count >= 1 required");
    auto fps = fixed_points(f);
    const std::pair<SpherePoint, double>* best = nullptr;
    for (const auto& fp : fps)
        if (fp.second > 1.0 + 1e-6 && (!best || fp.second > best->second)) best = &fp;
    if (!best) throw NumericError("julia_sample: no repelling fixed point found");

    std::vector<SpherePoint> out;
    out.reserve(count);
    out.push_back(best->first);
    CounterRng rng(seed, 0x4a756c6961ull); // stream tag for Julia sampling
    SpherePoint z = best->first;
    int produced = 1;
    for (int i = 0; produced < count; ++i) {
        auto pre = preimages(f, z);
        std::vector<SpherePoint> flat;
        for (const auto& [q, mult] : pre)
            for (int c = 0; c < mult; ++c) flat.push_back(q);
        z = flat[rng.next_below(flat.size())];
        if (i >= burnin) {
            out.push_back(z);
            ++produced;
        }
    }
    return out;
}

std::optional<std::vector<SpherePoint>> sample_clean_branch(const RationalMap& f,
                                                            const SpherePoint& x, int n,
                                                            CounterRng& rng) {
    struct Frame {
        std::vector<SpherePoint> cands;
        std::size_t next = 0;
    };
    std::vector<SpherePoint> chain{x};
    std::vector<Frame> stack;

    auto make_frame = [&](const SpherePoint& p) {
        Frame fr;
        for (const auto& [q, mult] : preimages(f, p)) {
            (void)mult;
            if (spherical_deriv(f, q) < 1e-12) continue; // exact/near-exact critical preimage
            fr.cands.push_back(q);
        }
        // Fisher-Yates with the branch's own counter stream
        for (std::size_t i = fr.cands.size(); i > 1; --i)
            std::swap(fr.cands[i - 1], fr.cands[rng.next_below(i)]);
        return fr;
    };

    stack.push_back(make_frame(x));
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next < top.cands.size()) {
            SpherePoint q = top.cands[top.next++];
            chain.push_back(q);
            if (static_cast<int>(chain.size()) == n + 1) return chain;
            stack.push_back(make_frame(q));
        } else {
            stack.pop_back();
            chain.pop_back();
        }
    }
    return std::nullopt;
}

ExpShrinkEstimate expshrink_estimate(const RationalMap& f, const ExpShrinkParams& params) {
    if (params.depth < 2) throw DomainError("expshrink: depth >= 2 required");
    if (!(params.r > 0.0) || params.r >= 2.0)
        throw DomainError("expshrink: r in (0, 2) required");

    std::vector<SpherePoint> bases;
    if (params.anchor) {
        bases.push_back(*params.anchor);
    } else {
        bases = julia_sample(f, params.base_samples, params.seed);
    }

    struct Job {
        SpherePoint base;
        std::vector<SpherePoint> chain;
    };
    std::vector<Job> jobs;
    int skipped = 0;
    for (std::size_t bi = 0; bi < bases.size(); ++bi) {
        std::vector<SpherePoint> endpoints;
        for (int j = 0; j < params.branch_samples; ++j) {
            CounterRng rng(params.seed, (bi + 1) * 0x10000ull + j);
            auto branch = sample_clean_branch(f, bases[bi], params.depth, rng);
            if (!branch) {
                ++skipped;
                continue;
            }
            bool dup = false;
            for (const auto& e : endpoints)
                if (chordal_dist(e, branch->back()) < 1e-12) dup = true;
            if (dup) continue;
            endpoints.push_back(branch->back());
            jobs.push_back({bases[bi], std::move(*branch)});
        }
    }
    if (jobs.empty()) throw NumericError("expshrink: no clean backward branches found");

    std::vector<std::vector<double>> diams(jobs.size());
    std::vector<char> ok(jobs.size(), 0);
    parallel_for(jobs.size(), params.threads, [&](std::size_t i) {
        try {
            auto tower = lift_tower(f, ChordalDisk(jobs[i].base, params.r), jobs[i].chain,
                                    params.circle_samples);
            std::vector<double> d;
            d.reserve(tower.size());
            for (const auto& curve : tower) d.push_back(curve_diameter(curve));
            diams[i] = std::move(d);
            ok[i] = 1;
        } catch (const Error&) {
            ok[i] = 0;
        }
    });

    ExpShrinkEstimate est;
    est.r_exp = params.r;
    est.attempted = static_cast<int>(jobs.size());
    est.skipped_branches = skipped;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (!ok[i]) ++est.failed;
    if (est.failed == est.attempted)
        throw NumericError("expshrink: every lift failed");
    est.unreliable = est.failed * 5 > est.attempted;

    est.per_n_max_diam.assign(params.depth, 0.0);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!ok[i]) continue;
        for (int k = 0; k < params.depth; ++k)
            est.per_n_max_diam[k] = std::max(est.per_n_max_diam[k], diams[i][k]);
    }

    // Regression of -log(max diam) against n over the tail window.
    int lo = std::max(1, params.depth / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int k = lo; k <= params.depth; ++k) {
        if (!(est.per_n_max_diam[k - 1] > 0.0)) continue;
        double x = k, y = -std::log(est.per_n_max_diam[k - 1]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) throw NumericError("expshrink: not enough data to fit a rate");
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    est.lambda_exp = std::exp(slope);
    est.observed = est.lambda_exp > 1.0;
    return est;
}

TceResult tce_check(const RationalMap& f, const CriticalSet& cs, const SpherePoint& z,
                    const TCEParams& params, int horizon, int circle_samples,
                    const std::vector<SpherePoint>& julia_points) {
    if (params.M < 0) throw ConfigError("tce_check: M >= 0 required");
    if (params.P < 1) throw ConfigError("tce_check: P >= 1 required");
    if (!(params.r > 0.0)) throw ConfigError("tce_check: r > 0 required");
    if (horizon < params.P) throw DomainError("tce_check: horizon N >= P required");

    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& s : julia_points) dmin = std::min(dmin, chordal_dist(z, s));
    if (!(dmin < 1e-6))
        throw DomainError("tce_check: z is not within 1e-6 of the Julia approximation");

    std::vector<SpherePoint> orbit(horizon + 1);
    orbit[0] = z;
    for (int k = 1; k <= horizon; ++k) orbit[k] = eval(f, orbit[k - 1]);

    TceResult res;
    res.z = z;
    res.params = params;
    res.horizon = horizon;
    res.all_counts.assign(horizon, 0);
    for (int n = 1; n <= horizon; ++n) {
        std::vector<SpherePoint> chain(n + 1);
        for (int j = 0; j <= n; ++j) chain[j] = orbit[n - j];
        int count = 0;
        try {
            auto tower = lift_tower(f, ChordalDisk(orbit[n], params.r), chain, circle_samples);
            for (const auto& curve : tower) {
                bool meets = false;
                for (const auto& e : cs.entries) {
                    try {
                        if (point_in_component(curve, e.point)) {
                            meets = true;
                            break;
                        }
                    } catch (const NumericError&) {
                        meets = true; // boundary-ambiguous counts as meeting Crit
                        break;
                    }
                }
                if (meets) ++count;
            }
            res.all_counts[n - 1] = count;
        } catch (const Error&) {
            ++res.skipped;
            res.all_counts[n - 1] = -1;
            continue;
        }
    }

    for (int n = 1; n <= horizon; ++n) {
        int count = res.all_counts[n - 1];
        if (count < 0 || count > params.M) continue;
        int j = static_cast<int>(res.chosen_nj.size()) + 1;
        if (n <= params.P * j) {
            res.chosen_nj.push_back(n);
            res.per_j_counts.push_back(count);
        }
    }
    res.pass = static_cast<int>(res.chosen_nj.size()) >= horizon / params.P;
    return res;
}

LemmaConstants lemma_constants(double epsilon, double alpha, int n, double lambda_exp,
                               double sup_deriv) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw DomainError("lemma_constants: epsilon in (0, 1] required");
    if (alpha < 0.0) throw DomainError("lemma_constants: alpha >= 0 required");
    if (n < 0) throw DomainError("lemma_constants: n >= 0 required");
    if (!(lambda_exp > 1.0)) throw DomainError("lemma_constants: lambda_exp > 1 required");
    if (!(sup_deriv >= 1.0)) throw DomainError("lemma_constants: sup_deriv >= 1 required");

    double L = std::log(lambda_exp);
    // integral part, nudged against one-ulp log/exp rounding
    auto ipart = [](double x) { return static_cast<long long>(std::floor(x + 1e-12)); };
    long long s = ipart((-std::log(epsilon) + 2.0 * alpha * n) / L) + 1;
    long long M = ipart(std::log(sup_deriv) / L) + 1;
    return {s, M};
}

double sup_spherical_deriv(const RationalMap& f, int samples) {
    if (samples < 100) throw DomainError("sup_spherical_deriv: samples >= 100 required");
    int per_chart = samples / 2;
    int nr = std::max(8, static_cast<int>(std::sqrt(per_chart / kTwoPi)));
    int ntheta = std::max(16, per_chart / nr);

    double best = 0.0;
    Complex best_w(0, 0);
    Chart best_chart = Chart::standard;
    for (Chart chart : {Chart::standard, Chart::inverted}) {
        double v0 = spherical_deriv(f, chart_to_sphere(Complex(0, 0), chart));
        if (v0 > best) {
            best = v0;
            best_w = Complex(0, 0);
            best_chart = chart;
        }
        for (int i = 1; i <= nr; ++i) {
            double r = double(i) / nr;
            for (int j = 0; j < ntheta; ++j) {
                double t = kTwoPi * j / ntheta;
                Complex w(r * std::cos(t), r * std::sin(t));
                double v = spherical_deriv(f, chart_to_sphere(w, chart));
                if (v > best) {
                    best = v;
                    best_w = w;
                    best_chart = chart;
                }
            }
        }
    }

    // Local compass refinement around the best grid point.
    double step = 1.0 / nr;
    Complex w = best_w;
    for (int iter = 0; iter < 60; ++iter) {
        bool improved = false;
        for (Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
            Complex cand = w + step * dir;
            if (best_chart == Chart::inverted && cand == Complex(0, 0)) continue;
            double v = spherical_deriv(f, chart_to_sphere(cand, best_chart));
            if (v > best) {
                best = v;
                w = cand;
                improved = true;
            }
        }
        if (!improved) step *= 0.6;
        if (step < 1e-12) break;
    }
    return best;
}

} // namespace celab
