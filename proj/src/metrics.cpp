#include "eitc/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace eitc {

double re_frobenius(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw std::invalid_argument("re_frobenius: shape mismatch");
    const double tn = truth.norm();
    if (tn == 0.0) throw std::invalid_argument("re_frobenius: zero truth norm");
    return (estimate - truth).norm() / tn;
}

ConductivityErrors conductivity_errors(const GridImage& gamma_hat, const GridImage& gamma) {
    if (gamma_hat.size != gamma.size) throw std::invalid_argument("conductivity_errors: grid mismatch");
    const int g = gamma.size;
    double num = 0.0, den = 0.0, abs_sum = 0.0;
    long count = 0;
    for (int j = 0; j < g; ++j) {
        const double y = GridImage::coord(j, g);
        for (int i = 0; i < g; ++i) {
            const double x = GridImage::coord(i, g);
            if (x * x + y * y > 1.0) continue;
            const double d = gamma_hat.at(i, j) - gamma.at(i, j);
            num += d * d;
            den += gamma.at(i, j) * gamma.at(i, j);
            abs_sum += std::abs(d);
            ++count;
        }
    }
    ConductivityErrors e;
    e.re = std::sqrt(num) / std::sqrt(den);
    e.mae = abs_sum / double(count);
    return e;
}

double ssim(const GridImage& a, const GridImage& b, int window, double c1, double c2) {
    if (a.size != b.size) throw std::invalid_argument("ssim: shape mismatch");
    if (window % 2 == 0 || window < 1) throw std::invalid_argument("ssim: window must be odd");
    if (window > a.size) throw std::invalid_argument("ssim: window larger than image");
    const int g = a.size, w = window;
    const double inv = 1.0 / (w * w);
    double total = 0.0;
    long count = 0;
    for (int j = 0; j + w <= g; ++j) {
        for (int i = 0; i + w <= g; ++i) {
            double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int v = 0; v < w; ++v)
                for (int u = 0; u < w; ++u) {
                    const double pa = a.at(i + u, j + v);
                    const double pb = b.at(i + u, j + v);
                    sa += pa;
                    sb += pb;
                    saa += pa * pa;
                    sbb += pb * pb;
                    sab += pa * pb;
                }
            const double mu1 = sa * inv, mu2 = sb * inv;
            const double var1 = saa * inv - mu1 * mu1;
            const double var2 = sbb * inv - mu2 * mu2;
            const double cov = sab * inv - mu1 * mu2;
            total += ((2.0 * mu1 * mu2 + c1) * (2.0 * cov + c2)) /
                     ((mu1 * mu1 + mu2 * mu2 + c1) * (var1 + var2 + c2));
            ++count;
        }
    }
    return total / double(count);
}

double ssim_default(const GridImage& estimate, const GridImage& truth) {
    const double range = truth.values.maxCoeff() - truth.values.minCoeff();
    const double L = range > 0.0 ? range : 1.0;
    const double c1 = (0.01 * L) * (0.01 * L);
    const double c2 = (0.03 * L) * (0.03 * L);
    return ssim(estimate, truth, 7, c1, c2);
}

EvaluationReport evaluation_report(
    const std::vector<std::string>& methods,
    const std::map<std::string, std::vector<ConductivityErrors>>& cond_errors,
    const std::map<std::string, std::vector<double>>& ssims,
    const std::map<std::string, double>& rates) {
    EvaluationReport rep;
    for (const auto& method : methods) {
        auto it = cond_errors.find(method);
        auto is = ssims.find(method);
        if (it == cond_errors.end() || it->second.empty() || is == ssims.end()) {
            rep.missing.push_back(method);
            continue;
        }
        MethodMetrics row;
        row.method = method;
        row.n_samples = int(it->second.size());
        for (const auto& e : it->second) {
            row.re += e.re;
            row.mae += e.mae;
        }
        for (double s : is->second) row.ssim += s;
        row.re /= row.n_samples;
        row.mae /= row.n_samples;
        row.ssim /= double(is->second.size());
        auto ir = rates.find(method);
        row.rate = (ir != rates.end()) ? ir->second : 1.0;
        rep.rows.push_back(row);
    }
    return rep;
}

std::string EvaluationReport::to_csv() const {
    std::ostringstream ss;
    ss << "method,rate,ssim,re,mae\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f\n", r.method.c_str(), r.rate,
                      r.ssim, r.re, r.mae);
        ss << buf;
    }
    return ss.str();
}

std::string EvaluationReport::to_table() const {
    std::ostringstream ss;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%-24s %8s %8s %8s %8s\n", "method", "rate", "SSIM", "RE",
                  "MAE");
    ss << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-24s %7.2f%% %8.3f %7.2f%% %8.4f\n", r.method.c_str(),
                      100.0 * r.rate, r.ssim, 100.0 * r.re, r.mae);
        ss << buf;
    }
    for (const auto& m : missing) ss << "missing outputs for method: " << m << "\n";
    return ss.str();
}

} // namespace eitc
