// Command-line front end: quadrature planning, phi-function actions of
// Kronecker-sum matrices, benchmark problems and time-stepping convergence
// studies, all emitting CSV (or dense matrix text for ad-hoc phi runs).

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phiquad/phiquad.hpp"

namespace {

using namespace phiquad;

/// Shortest decimal form that round-trips the double exactly.
std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

QuadKind parse_rule(const std::string& rule) {
    if (rule == "gauss") return QuadKind::gauss_legendre;
    if (rule == "cc") return QuadKind::clenshaw_curtis;
    throw std::invalid_argument("--rule must be 'gauss' or 'cc'");
}

/// Writes lines to --out or stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

struct PlanArgs {
    std::vector<double> alphas;
    int p = 20;
    double eps = 1e-14;
    double beta = 1.0;
    std::string rule = "gauss";
    double c1 = 0.0;
    double c2 = 1.0;
    int d = 1;
    std::string out;
};

int run_plan(const PlanArgs& args) {
    const QuadKind kind = parse_rule(args.rule);
    CostModel cost{args.c1, args.c2, args.d};
    Output output(args.out);
    std::ostream& os = output.stream();
    os << "alpha,rule,l,n,C\n";
    QuadraturePlan last{};
    for (double alpha : args.alphas) {
        if (!(alpha > 0.0)) throw std::invalid_argument("plan: need alpha > 0");
        last = setup_quadrature(args.eps, args.p, alpha, args.beta, kind, cost);
        os << fmt(alpha) << ',' << args.rule << ',' << last.l << ',' << last.n << ','
           << fmt(last.cost) << '\n';
    }
    os << "# plan: l=" << last.l << ",n=" << last.n << ",rule=" << args.rule
       << ",eps=" << fmt(args.eps) << '\n';
    return 0;
}

struct BenchArgs {
    int problem = 1;
    int r = 4;
    int p = 20;
    double tau = 0.125;
    std::string rule = "gauss";
    double eps = 1e-14;
    std::optional<int> l;
    double c1 = 0.0;
    double c2 = 1.0;
    bool verify = false;
    std::string out;
    int threads = default_thread_count();
};

TensorProblem assemble_bench_problem(int problem, int r) {
    switch (problem) {
        case 1: return make_problem1(r);
        case 2: return make_problem2(r);
        case 3: {
            auto p3 = make_problem3(r);
            return TensorProblem{std::move(p3.a), std::move(p3.u0)};
        }
        default: throw std::invalid_argument("bench: --problem must be 1, 2 or 3");
    }
}

int run_bench(const BenchArgs& args) {
    if (args.p < 1) throw std::invalid_argument("bench: need --p >= 1");
    if (!(args.tau > 0.0)) throw std::invalid_argument("bench: need --tau > 0");
    TensorProblem prob = assemble_bench_problem(args.problem, args.r);
    const KroneckerSum arg = prob.a.scaled(-args.tau);
    const int dim = arg.dim();

    std::vector<std::vector<double>> oracle;
    if (args.verify) {
        if (dim + args.p > 1000)
            throw std::invalid_argument(
                "bench: --verify needs dim + p <= 1000 (got dim = " + std::to_string(dim) +
                "); use a smaller --r");
        oracle = phi_dense_oracle(arg, prob.b, args.p);
    }

    PhiRequest req;
    req.p = args.p;
    req.eps = args.eps;
    req.mode = parse_rule(args.rule);
    req.l = args.l;
    req.cost = CostModel{args.c1, args.c2, 1};
    req.threads = args.threads;
    PhiInfo info;
    const PhiColumns y = phiquadmv(arg, prob.b, req, &info);

    Output output(args.out);
    std::ostream& os = output.stream();
    os << "p,rel_err\n";
    for (int p = 1; p <= args.p; ++p) {
        const double err = args.verify
                               ? relative_error_inf(y.col(p), oracle[static_cast<size_t>(p - 1)])
                               : std::numeric_limits<double>::quiet_NaN();
        os << p << ',' << fmt(err) << '\n';
    }
    os << "# plan: l=" << info.l << ",n=" << info.n << ",rule=" << args.rule
       << ",eps=" << fmt(args.eps) << ",alpha=" << fmt(info.alpha) << ",dim=" << dim
       << ",points=" << info.points << '\n';
    return 0;
}

struct ConvergeArgs {
    int problem = 3;
    int r = 5;
    std::string rule = "gauss";
    double eps = 1e-14;
    std::optional<double> tau;
    std::optional<double> c2_rk;
    double c1 = 0.0;
    double c2 = 1.0;
    std::string out;
    int threads = default_thread_count();
};

int run_converge(const ConvergeArgs& args) {
    if (args.problem != 3)
        throw std::invalid_argument("converge: only --problem 3 (semilinear) is supported");
    SemilinearProblem prob = make_problem3(args.r);
    PhiRequest base;
    base.eps = args.eps;
    base.mode = parse_rule(args.rule);
    base.cost = CostModel{args.c1, args.c2, 1};
    base.threads = args.threads;

    const ExpRKTableau euler = exp_euler_tableau();
    const ExpRKTableau rk2 = exp_rk2_tableau(args.c2_rk.value_or(0.5));
    const ExpRKTableau rk3 = exp_rk3_tableau(args.c2_rk.value_or(1.0 / 3.0));

    std::vector<int> steps;
    if (args.tau) {
        if (!(*args.tau > 0.0) || *args.tau > 1.0)
            throw std::invalid_argument("converge: need 0 < --tau <= 1");
        steps.push_back(std::max(1, static_cast<int>(std::lround(1.0 / *args.tau))));
    } else {
        for (int m = 2; m <= 64; m *= 2) steps.push_back(m);
    }

    Output output(args.out);
    std::ostream& os = output.stream();
    os << "tau,err_euler,err_rk2,err_rk3\n";
    const auto exact = prob.exact(1.0);
    double tau_last = 1.0;
    for (int m : steps) {
        const double tau = 1.0 / m;
        tau_last = tau;
        const auto r1 = integrate(prob.a, prob.f, prob.u0, 0.0, 1.0, m, euler, base);
        const auto r2 = integrate(prob.a, prob.f, prob.u0, 0.0, 1.0, m, rk2, base);
        const auto r3 = integrate(prob.a, prob.f, prob.u0, 0.0, 1.0, m, rk3, base);
        os << fmt(tau) << ',' << fmt(relative_error_inf(r1.u, exact)) << ','
           << fmt(relative_error_inf(r2.u, exact)) << ','
           << fmt(relative_error_inf(r3.u, exact)) << '\n';
    }

    const double alpha = tau_last * infnorm_bound(prob.a);
    CostModel cost{args.c1, args.c2, prob.a.order()};
    const QuadraturePlan plan = setup_quadrature(args.eps, 2, alpha, 1.0, base.mode, cost);
    os << "# plan: l=" << plan.l << ",n=" << plan.n << ",rule=" << args.rule
       << ",eps=" << fmt(args.eps) << ",alpha=" << fmt(alpha) << ",dim=" << prob.a.dim() << '\n';
    return 0;
}

struct PhiArgs {
    std::vector<std::string> matrix_files;
    std::string b_file;
    int p = 1;
    std::string rule = "gauss";
    double eps = 1e-14;
    std::optional<int> l;
    std::string out;
    int threads = default_thread_count();
};

DenseMatrix read_matrix_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open matrix file: " + path);
    return read_matrix_text(is);
}

int run_phi(const PhiArgs& args) {
    if (args.p < 1) throw std::invalid_argument("phi: need --p >= 1");
    std::vector<DenseMatrix> factors;
    factors.reserve(args.matrix_files.size());
    for (const auto& path : args.matrix_files) factors.push_back(read_matrix_file(path));
    const KroneckerSum a(std::move(factors));

    DenseMatrix bm = read_matrix_file(args.b_file);
    if (bm.cols() != 1 && bm.rows() != 1)
        throw std::invalid_argument("phi: --b-file must hold a single row or column");
    std::vector<double> b(bm.data(), bm.data() + static_cast<size_t>(bm.rows()) * bm.cols());
    if (static_cast<int>(b.size()) != a.dim())
        throw std::invalid_argument("phi: vector length does not match the Kronecker-sum size");

    PhiRequest req;
    req.p = args.p;
    req.eps = args.eps;
    req.mode = parse_rule(args.rule);
    req.l = args.l;
    req.threads = args.threads;
    PhiInfo info;
    const PhiColumns y = phiquadmv(a, b, req, &info);

    DenseMatrix cols(a.dim(), args.p);
    for (int j = 1; j <= args.p; ++j)
        for (int i = 0; i < a.dim(); ++i) cols(i, j - 1) = y.col(j)[static_cast<size_t>(i)];
    Output output(args.out);
    write_matrix_text(output.stream(), cols);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Actions of phi-functions of Kronecker-sum matrices via quadrature"};
    app.require_subcommand(1);

    PlanArgs plan_args;
    CLI::App* plan = app.add_subcommand("plan", "Print scaling/quadrature plans for given norms");
    plan->add_option("--alpha", plan_args.alphas, "Infinity norm(s) of the matrix argument")
        ->required();
    plan->add_option("--p", plan_args.p, "Highest phi index")->check(CLI::PositiveNumber);
    plan->add_option("--eps", plan_args.eps, "Quadrature error tolerance");
    plan->add_option("--beta", plan_args.beta, "Infinity norm of the vector");
    plan->add_option("--rule", plan_args.rule, "Quadrature rule (gauss|cc)");
    plan->add_option("--c1", plan_args.c1, "Cost weight of a 1D matrix exponential");
    plan->add_option("--c2-cost", plan_args.c2, "Cost weight of a matrix-vector product");
    plan->add_option("--d", plan_args.d, "Spatial dimension in the cost model")
        ->check(CLI::Range(1, 3));
    plan->add_option("--out", plan_args.out, "Output file (default stdout)");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Run a phi-action benchmark problem");
    bench->add_option("--problem", bench_args.problem, "Benchmark problem (1, 2 or 3)")
        ->check(CLI::Range(1, 3));
    bench->add_option("--r", bench_args.r, "Mesh refinement exponent (2^r elements)")
        ->check(CLI::Range(1, 14));
    bench->add_option("--p", bench_args.p, "Highest phi index")->check(CLI::PositiveNumber);
    bench->add_option("--tau", bench_args.tau, "Timestep scaling of the operator");
    bench->add_option("--rule", bench_args.rule, "Quadrature rule (gauss|cc)");
    bench->add_option("--eps", bench_args.eps, "Quadrature error tolerance");
    bench->add_option("--l", bench_args.l, "Fixed scaling level (skips planning)")
        ->check(CLI::NonNegativeNumber);
    bench->add_option("--c1", bench_args.c1, "Cost weight of a 1D matrix exponential");
    bench->add_option("--c2-cost", bench_args.c2, "Cost weight of a matrix-vector product");
    bench->add_flag("--verify", bench_args.verify, "Compare against the dense reference");
    bench->add_option("--out", bench_args.out, "Output file (default stdout)");
    bench->add_option("--threads", bench_args.threads, "Worker thread cap")
        ->check(CLI::PositiveNumber);

    ConvergeArgs conv_args;
    CLI::App* conv =
        app.add_subcommand("converge", "Time-stepping convergence study on the semilinear problem");
    conv->add_option("--problem", conv_args.problem, "Benchmark problem id (only 3 applies)");
    conv->add_option("--r", conv_args.r, "Mesh refinement exponent (2^r elements)")
        ->check(CLI::Range(1, 12));
    conv->add_option("--rule", conv_args.rule, "Quadrature rule (gauss|cc)");
    conv->add_option("--eps", conv_args.eps, "Quadrature error tolerance");
    conv->add_option("--tau", conv_args.tau, "Single step size (default: the ladder 1/2..1/64)");
    conv->add_option("--c2-rk", conv_args.c2_rk, "Free stage node for RK2/RK3");
    conv->add_option("--c1", conv_args.c1, "Cost weight of a 1D matrix exponential");
    conv->add_option("--c2-cost", conv_args.c2, "Cost weight of a matrix-vector product");
    conv->add_option("--out", conv_args.out, "Output file (default stdout)");
    conv->add_option("--threads", conv_args.threads, "Worker thread cap")
        ->check(CLI::PositiveNumber);

    PhiArgs phi_args;
    CLI::App* phi = app.add_subcommand("phi", "Apply phi-functions to a vector from text files");
    phi->add_option("--matrix-file", phi_args.matrix_files,
                    "Kronecker-sum factor (repeat up to 3 times, leftmost slowest)")
        ->required()
        ->expected(1, 3);
    phi->add_option("--b-file", phi_args.b_file, "Vector file (single row or column)")->required();
    phi->add_option("--p", phi_args.p, "Highest phi index")->check(CLI::PositiveNumber);
    phi->add_option("--rule", phi_args.rule, "Quadrature rule (gauss|cc)");
    phi->add_option("--eps", phi_args.eps, "Quadrature error tolerance");
    phi->add_option("--l", phi_args.l, "Fixed scaling level (skips planning)")
        ->check(CLI::NonNegativeNumber);
    phi->add_option("--out", phi_args.out, "Output file (default stdout)");
    phi->add_option("--threads", phi_args.threads, "Worker thread cap")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (plan->parsed()) return run_plan(plan_args);
        if (bench->parsed()) return run_bench(bench_args);
        if (conv->parsed()) return run_converge(conv_args);
        if (phi->parsed()) return run_phi(phi_args);
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
