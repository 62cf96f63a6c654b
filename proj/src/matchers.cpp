#include "mbl/matchers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "mbl/errors.hpp"
#include "mbl/fft.hpp"

namespace mbl {

namespace {

struct Matd {
    int w = 0, h = 0;
    std::vector<double> v;
    Matd() = default;
    Matd(int w_, int h_) : w(w_), h(h_), v(size_t(w_) * h_, 0.0) {}
    double& at(int x, int y) { return v[size_t(y) * w + x]; }
    double at(int x, int y) const { return v[size_t(y) * w + x]; }
};

Matd to_matd(const Image8& img) {
    Matd m(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) m.v[i] = img.data[i];
    return m;
}

// Integral image with a zero top row / left column: I(x, y) sums the
// rectangle [0,x) x [0,y). Exact for 8-bit inputs in double.
std::vector<double> integral(const Matd& m) {
    std::vector<double> I(size_t(m.w + 1) * (m.h + 1), 0.0);
    for (int y = 0; y < m.h; ++y) {
        double row = 0.0;
        for (int x = 0; x < m.w; ++x) {
            row += m.at(x, y);
            I[size_t(y + 1) * (m.w + 1) + (x + 1)] =
                I[size_t(y) * (m.w + 1) + (x + 1)] + row;
        }
    }
    return I;
}

inline double integral_at(const std::vector<double>& I, int stride, double x, double y) {
    // bilinear lookup: equals exact area sums over fractional rectangles of
    // a piecewise-constant image
    int x0 = int(x), y0 = int(y);
    double fx = x - x0, fy = y - y0;
    const double* row0 = &I[size_t(y0) * stride];
    const double* row1 = &I[size_t(y0 + 1) * stride];
    double a = row0[x0] * (1 - fx) + row0[x0 + 1] * fx;
    double b = row1[x0] * (1 - fx) + row1[x0 + 1] * fx;
    return a * (1 - fy) + b * fy;
}

// Exact area-average shrink (box filter with fractional boxes) when the
// target is smaller, bilinear when larger.
Matd resize_to(const Matd& src, int tw, int th) {
    Matd out(tw, th);
    if (tw <= src.w && th <= src.h) {
        auto I = integral(src);
        int stride = src.w + 1;
        double sx = double(src.w) / tw, sy = double(src.h) / th;
        for (int y = 0; y < th; ++y) {
            double y0 = y * sy, y1 = (y + 1) * sy;
            if (y1 > src.h) y1 = src.h;
            for (int x = 0; x < tw; ++x) {
                double x0 = x * sx, x1 = (x + 1) * sx;
                if (x1 > src.w) x1 = src.w;
                double sum = integral_at(I, stride, x1, y1) -
                             integral_at(I, stride, x0, y1) -
                             integral_at(I, stride, x1, y0) +
                             integral_at(I, stride, x0, y0);
                out.at(x, y) = sum / ((x1 - x0) * (y1 - y0));
            }
        }
    } else {
        double sx = double(src.w) / tw, sy = double(src.h) / th;
        for (int y = 0; y < th; ++y) {
            double v = (y + 0.5) * sy - 0.5;
            double vc = std::clamp(v, 0.0, double(src.h - 1));
            int y0 = std::min(int(vc), src.h - 2 < 0 ? 0 : src.h - 2);
            double fy = vc - y0;
            for (int x = 0; x < tw; ++x) {
                double u = (x + 0.5) * sx - 0.5;
                double uc = std::clamp(u, 0.0, double(src.w - 1));
                int x0 = std::min(int(uc), src.w - 2 < 0 ? 0 : src.w - 2);
                double fx = uc - x0;
                int x1 = std::min(x0 + 1, src.w - 1), y1 = std::min(y0 + 1, src.h - 1);
                out.at(x, y) = src.at(x0, y0) * (1 - fx) * (1 - fy) +
                               src.at(x1, y0) * fx * (1 - fy) +
                               src.at(x0, y1) * (1 - fx) * fy +
                               src.at(x1, y1) * fx * fy;
            }
        }
    }
    return out;
}

Matd crop(const Matd& src, int x0, int y0, int w, int h) {
    Matd out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = src.at(x0 + x, y0 + y);
    return out;
}

// Linear cross-correlation corr(p) = sum_i t(i) * w(p + i) of a zero-mean
// template against a window, via one packed forward FFT and one inverse.
std::vector<double> cross_correlate(const Matd& win, const Matd& templ_zero_mean) {
    size_t R = next_pow2(size_t(win.h + templ_zero_mean.h - 1));
    size_t C = next_pow2(size_t(win.w + templ_zero_mean.w - 1));
    std::vector<std::complex<double>> z(R * C, {0.0, 0.0});
    for (int y = 0; y < win.h; ++y)
        for (int x = 0; x < win.w; ++x) z[size_t(y) * C + x].real(win.at(x, y));
    for (int y = 0; y < templ_zero_mean.h; ++y)
        for (int x = 0; x < templ_zero_mean.w; ++x)
            z[size_t(y) * C + x].imag(templ_zero_mean.at(x, y));
    fft2(z, R, C, false);

    // unpack the two real spectra and form W * conj(T)
    std::vector<std::complex<double>> g(R * C);
    for (size_t r = 0; r < R; ++r) {
        size_t rr = (R - r) % R;
        for (size_t c = 0; c < C; ++c) {
            size_t cc = (C - c) % C;
            std::complex<double> zk = z[r * C + c];
            std::complex<double> zm = std::conj(z[rr * C + cc]);
            std::complex<double> Wk = 0.5 * (zk + zm);
            std::complex<double> Tk = std::complex<double>(0.0, -0.5) * (zk - zm);
            g[r * C + c] = Wk * std::conj(Tk);
        }
    }
    fft2(g, R, C, true);
    std::vector<double> corr(size_t(win.w) * win.h, 0.0);
    int pw = win.w - templ_zero_mean.w + 1;
    int ph = win.h - templ_zero_mean.h + 1;
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x)
            corr[size_t(y) * win.w + x] = g[size_t(y) * C + x].real();
    return corr; // only [0, pw) x [0, ph) is meaningful
}

struct Peak {
    bool valid = false;
    double rho = -2.0;
    int px = 0, py = 0;     // integer peak (window position of template origin)
    double sx = 0, sy = 0;  // sub-pixel offsets
};

// Best NCC over all valid placements of `templ` inside `win`.
Peak ncc_peak(const Matd& win, const Matd& templ) {
    Peak peak;
    int pw = win.w - templ.w + 1;
    int ph = win.h - templ.h + 1;
    if (pw <= 0 || ph <= 0) return peak;

    double n = double(templ.w) * templ.h;
    double tmean = 0.0;
    for (double x : templ.v) tmean += x;
    tmean /= n;
    Matd t0(templ.w, templ.h);
    double sst = 0.0;
    for (size_t i = 0; i < templ.v.size(); ++i) {
        t0.v[i] = templ.v[i] - tmean;
        sst += t0.v[i] * t0.v[i];
    }
    if (sst < 1e-7 * n) return peak; // flat template

    auto corr = cross_correlate(win, t0);
    auto I1 = integral(win);
    Matd win2(win.w, win.h);
    for (size_t i = 0; i < win.v.size(); ++i) win2.v[i] = win.v[i] * win.v[i];
    auto I2 = integral(win2);
    int stride = win.w + 1;
    auto rect = [&](const std::vector<double>& I, int x, int y) {
        return I[size_t(y + templ.h) * stride + (x + templ.w)] -
               I[size_t(y) * stride + (x + templ.w)] -
               I[size_t(y + templ.h) * stride + x] + I[size_t(y) * stride + x];
    };
    auto rho_at = [&](int x, int y) {
        double s1 = rect(I1, x, y);
        double s2 = rect(I2, x, y);
        double var = s2 - s1 * s1 / n;
        if (var < 1e-7 * n) return -2.0; // flat patch, no correlation defined
        double r = corr[size_t(y) * win.w + x] / std::sqrt(sst * var);
        return std::clamp(r, -1.0, 1.0);
    };

    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x) {
            double r = rho_at(x, y);
            if (r > peak.rho) {
                peak.rho = r;
                peak.px = x;
                peak.py = y;
                peak.valid = true;
            }
        }
    if (!peak.valid) return peak;

    // separable 3-point parabola, skipped on the border
    auto refine = [](double fm, double f0, double fp) {
        double den = fm - 2.0 * f0 + fp;
        if (std::abs(den) < 1e-12) return 0.0;
        double d = 0.5 * (fm - fp) / den;
        return std::clamp(d, -0.5, 0.5);
    };
    if (peak.px > 0 && peak.px + 1 < pw) {
        double fm = rho_at(peak.px - 1, peak.py), fp = rho_at(peak.px + 1, peak.py);
        if (fm > -2.0 && fp > -2.0) peak.sx = refine(fm, peak.rho, fp);
    }
    if (peak.py > 0 && peak.py + 1 < ph) {
        double fm = rho_at(peak.px, peak.py - 1), fp = rho_at(peak.px, peak.py + 1);
        if (fm > -2.0 && fp > -2.0) peak.sy = refine(fm, peak.rho, fp);
    }
    return peak;
}

void sort_matches(std::vector<Match>& m) {
    std::sort(m.begin(), m.end(), [](const Match& a, const Match& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.query_u != b.query_u) return a.query_u < b.query_u;
        if (a.query_v != b.query_v) return a.query_v < b.query_v;
        if (a.window_u != b.window_u) return a.window_u < b.window_u;
        return a.window_v < b.window_v;
    });
}

std::vector<double> default_scales() {
    std::vector<double> s(7);
    double lo = std::log(1.0), hi = std::log(3.125);
    for (int i = 0; i < 7; ++i) s[size_t(i)] = std::exp(lo + (hi - lo) * i / 6.0);
    return s;
}

// One scale hypothesis: window resampled by 1/scale to the hypothesized
// query GSD, query cropped centrally if it still does not fit.
struct ScalePlan {
    double scale = 1.0;
    int win_w = 0, win_h = 0;   // resampled window dims
    int crop_x = 0, crop_y = 0; // query crop offset
    int tw = 0, th = 0;         // template dims (query crop)
    bool overflow = false;      // query larger than window, crop disabled
    bool valid = false;
};

ScalePlan plan_scale(double s, int qw, int qh, int ww, int wh, bool crop_to_fit) {
    ScalePlan p;
    p.scale = s;
    p.win_w = std::max(1, int(std::lround(ww / s)));
    p.win_h = std::max(1, int(std::lround(wh / s)));
    // leave search slack so the peak is not pinned to the border
    int max_tw = int(std::floor(0.85 * p.win_w));
    int max_th = int(std::floor(0.85 * p.win_h));
    p.tw = qw;
    p.th = qh;
    if (qw > max_tw || qh > max_th) {
        if (!crop_to_fit) {
            p.overflow = true;
            return p;
        }
        p.tw = std::min(qw, max_tw);
        p.th = std::min(qh, max_th);
    }
    if (p.tw < 8 || p.th < 8) return p;
    p.crop_x = (qw - p.tw) / 2;
    p.crop_y = (qh - p.th) / 2;
    p.valid = true;
    return p;
}

struct ScaleEval {
    ScalePlan plan;
    Peak peak;
};

ScaleEval eval_scale(const Matd& query, const Matd& window, const ScalePlan& plan,
                     int decimation) {
    ScaleEval ev;
    ev.plan = plan;
    Matd win = resize_to(window, plan.win_w, plan.win_h);
    Matd templ = crop(query, plan.crop_x, plan.crop_y, plan.tw, plan.th);
    if (decimation > 1) {
        int dw = std::max(8, win.w / decimation), dh = std::max(8, win.h / decimation);
        // keep the template/window scale ratio intact under rounding
        double fx = double(win.w) / dw;
        double fy = double(win.h) / dh;
        int tw = std::max(4, int(std::lround(templ.w / fx)));
        int th = std::max(4, int(std::lround(templ.h / fy)));
        Matd dwin = resize_to(win, dw, dh);
        Matd dtem = resize_to(templ, tw, th);
        ev.peak = ncc_peak(dwin, dtem);
        return ev;
    }
    ev.peak = ncc_peak(win, templ);
    return ev;
}

} // namespace

MatchSet ncc_match(const Image8& query, const Image8& window, const MatchParams& params) {
    if (query.empty() || window.empty())
        throw InvalidParameterError("ncc_match: images must be non-empty");
    MatchSet out;
    out.matcher = "ncc";

    std::vector<double> scales;
    if (params.scale_hint > 0) {
        scales = {params.scale_hint * 0.97, params.scale_hint, params.scale_hint * 1.03};
    } else if (!params.scales.empty()) {
        scales = params.scales;
    } else {
        scales = default_scales();
    }
    for (double& s : scales) s = std::max(s, 1e-3);

    std::vector<ScalePlan> plans;
    int overflow_count = 0;
    for (double s : scales) {
        ScalePlan p = plan_scale(s, query.width, query.height, window.width,
                                 window.height, params.crop_to_fit);
        if (p.overflow) ++overflow_count;
        if (p.valid) plans.push_back(p);
    }
    if (plans.empty()) {
        if (overflow_count == int(scales.size()))
            throw InvalidParameterError("ncc_match: query larger than window at all scales");
        return out;
    }

    Matd q = to_matd(query);
    Matd w = to_matd(window);

    // coarse gate and scale shortlist
    std::vector<size_t> full_idx;
    if (params.prefilter && window.width >= 4 * params.prefilter_decimation * 8) {
        double best_coarse = -2.0;
        size_t best_i = 0;
        for (size_t i = 0; i < plans.size(); ++i) {
            ScaleEval ev = eval_scale(q, w, plans[i], params.prefilter_decimation);
            if (ev.peak.valid && ev.peak.rho > best_coarse) {
                best_coarse = ev.peak.rho;
                best_i = i;
            }
        }
        if (best_coarse < 2.0 * params.prefilter_min_conf - 1.0) return out;
        if (best_i > 0) full_idx.push_back(best_i - 1);
        full_idx.push_back(best_i);
        if (best_i + 1 < plans.size()) full_idx.push_back(best_i + 1);
    } else {
        for (size_t i = 0; i < plans.size(); ++i) full_idx.push_back(i);
    }

    ScaleEval best;
    for (size_t i : full_idx) {
        ScaleEval ev = eval_scale(q, w, plans[i], 1);
        if (ev.peak.valid && ev.peak.rho > best.peak.rho) best = ev;
    }
    if (!best.peak.valid) return out;

    const ScalePlan& plan = best.plan;
    out.scale = plan.scale;
    // actual per-axis factors after integer rounding of the window dims
    double fx = double(window.width) / plan.win_w;
    double fy = double(window.height) / plan.win_h;
    double conf = std::clamp(0.5 * (1.0 + best.peak.rho), 0.0, 1.0);

    for (int qu = plan.crop_x; qu < plan.crop_x + plan.tw; qu += params.grid_step) {
        for (int qv = plan.crop_y; qv < plan.crop_y + plan.th; qv += params.grid_step) {
            double wsx = best.peak.px + best.peak.sx + (qu - plan.crop_x);
            double wsy = best.peak.py + best.peak.sy + (qv - plan.crop_y);
            double wu = (wsx + 0.5) * fx - 0.5;
            double wv = (wsy + 0.5) * fy - 0.5;
            if (wu < 0 || wu > window.width - 1 || wv < 0 || wv > window.height - 1)
                continue;
            out.matches.push_back(Match{double(qu), double(qv), wu, wv, conf});
        }
    }
    sort_matches(out.matches);
    return out;
}

PhaseShift phase_correlate(const Image8& a, const Image8& b) {
    if (a.empty() || b.empty() || a.width != b.width || a.height != b.height)
        throw InvalidParameterError("phase_correlate: images must be equal-sized and non-empty");
    size_t R = size_t(a.height), C = size_t(a.width);
    if (next_pow2(R) != R || next_pow2(C) != C)
        throw InvalidParameterError("phase_correlate: dimensions must be powers of two");

    double ma = 0, mb = 0;
    for (uint8_t v : a.data) ma += v;
    for (uint8_t v : b.data) mb += v;
    ma /= double(a.data.size());
    mb /= double(b.data.size());
    double va = 0, vb = 0;
    for (uint8_t v : a.data) va += (v - ma) * (v - ma);
    for (uint8_t v : b.data) vb += (v - mb) * (v - mb);
    if (va < 1e-9 || vb < 1e-9)
        throw InvalidParameterError("phase_correlate: zero-variance input");

    std::vector<std::complex<double>> z(R * C);
    for (size_t i = 0; i < R * C; ++i)
        z[i] = {double(a.data[i]) - ma, double(b.data[i]) - mb};
    fft2(z, R, C, false);

    std::vector<std::complex<double>> p(R * C);
    for (size_t r = 0; r < R; ++r) {
        size_t rr = (R - r) % R;
        for (size_t c = 0; c < C; ++c) {
            size_t cc = (C - c) % C;
            std::complex<double> zk = z[r * C + c];
            std::complex<double> zm = std::conj(z[rr * C + cc]);
            std::complex<double> A = 0.5 * (zk + zm);
            std::complex<double> B = std::complex<double>(0.0, -0.5) * (zk - zm);
            std::complex<double> cp = std::conj(A) * B;
            double mag = std::abs(cp);
            p[r * C + c] = mag > 1e-300 ? cp / mag : std::complex<double>(0.0, 0.0);
        }
    }
    fft2(p, R, C, true);

    // an exact circular shift yields a unit delta after the normalized
    // inverse transform
    size_t best = 0;
    double best_v = -1e300;
    for (size_t i = 0; i < R * C; ++i) {
        double v = p[i].real();
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    long px = long(best % C), py = long(best / C);
    auto wrapped = [&](long x, long y) {
        size_t xi = size_t((x % long(C) + long(C)) % long(C));
        size_t yi = size_t((y % long(R) + long(R)) % long(R));
        return p[yi * C + xi].real();
    };
    auto refine = [](double fm, double f0, double fp) {
        double den = fm - 2.0 * f0 + fp;
        if (std::abs(den) < 1e-12) return 0.0;
        return std::clamp(0.5 * (fm - fp) / den, -0.5, 0.5);
    };
    double sx = refine(wrapped(px - 1, py), best_v, wrapped(px + 1, py));
    double sy = refine(wrapped(px, py - 1), best_v, wrapped(px, py + 1));

    PhaseShift out;
    double dx = double(px) + sx, dy = double(py) + sy;
    if (dx > double(C) / 2) dx -= double(C);
    if (dy > double(R) / 2) dy -= double(R);
    out.dx = dx;
    out.dy = dy;
    out.response = std::clamp(best_v, 0.0, 1.0);
    return out;
}

std::vector<Match> filter_matches(const std::vector<MatchSet>& sets, size_t top_k,
                                  double conf_threshold) {
    std::vector<Match> out;
    for (const auto& set : sets) {
        std::vector<Match> sorted = set.matches;
        sort_matches(sorted);
        size_t n = std::min(top_k, sorted.size());
        for (size_t i = 0; i < n; ++i)
            if (sorted[i].confidence >= conf_threshold) out.push_back(sorted[i]);
    }
    return out;
}

namespace {

std::map<std::string, MatcherFn>& registry() {
    static std::map<std::string, MatcherFn> reg = [] {
        std::map<std::string, MatcherFn> r;
        r["ncc"] = [](const Image8& q, const Image8& wg, const ImageF&,
                      const MatchParams& p) { return ncc_match(q, wg, p); };
        r["phase"] = [](const Image8& q, const Image8& wg, const ImageF&,
                        const MatchParams& p) {
            // scale-1 translation matcher: both images mean-padded onto a
            // common power-of-two canvas
            MatchSet out;
            out.matcher = "phase";
            size_t cw = next_pow2(size_t(std::max(q.width, wg.width)));
            size_t ch = next_pow2(size_t(std::max(q.height, wg.height)));
            auto padded = [&](const Image8& img) {
                double mean = 0;
                for (uint8_t v : img.data) mean += v;
                mean /= double(img.data.size());
                Image8 canvas(int(cw), int(ch), uint8_t(std::lround(mean)));
                for (int y = 0; y < img.height; ++y)
                    for (int x = 0; x < img.width; ++x)
                        canvas.at(x, y) = img.at(x, y);
                return canvas;
            };
            PhaseShift ps = phase_correlate(padded(q), padded(wg));
            for (int qu = 0; qu < q.width; qu += p.grid_step) {
                for (int qv = 0; qv < q.height; qv += p.grid_step) {
                    double wu = qu + ps.dx;
                    double wv = qv + ps.dy;
                    if (wu < 0 || wu > wg.width - 1 || wv < 0 || wv > wg.height - 1)
                        continue;
                    out.matches.push_back(
                        Match{double(qu), double(qv), wu, wv, ps.response});
                }
            }
            sort_matches(out.matches);
            return out;
        };
        return r;
    }();
    return reg;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

void register_matcher(const std::string& name, MatcherFn fn) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    registry()[name] = std::move(fn);
}

MatchSet run_matcher(const std::string& name, const Image8& query,
                     const Image8& window_gray, const ImageF& window_depth_norm,
                     const MatchParams& params) {
    MatcherFn fn;
    {
        std::lock_guard<std::mutex> lock(registry_mutex());
        auto it = registry().find(name);
        if (it == registry().end()) {
            std::string known;
            for (const auto& [k, _] : registry()) known += (known.empty() ? "" : ", ") + k;
            throw InvalidParameterError("unknown matcher \"" + name + "\" (known: " + known + ")");
        }
        fn = it->second;
    }
    MatchSet out = fn(query, window_gray, window_depth_norm, params);
    out.matcher = name;
    return out;
}

std::vector<std::string> matcher_names() {
    std::lock_guard<std::mutex> lock(registry_mutex());
    std::vector<std::string> names;
    for (const auto& [k, _] : registry()) names.push_back(k);
    return names;
}

} // namespace mbl
