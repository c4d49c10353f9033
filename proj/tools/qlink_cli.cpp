// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qlink command-line driver.

#include "qlink/qlink.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace qlink;
using nlohmann::json;

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2, kTransport = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string remote;
    std::string format = "csv";
    std::string out;

    int qubits = 0;
    bool density = false;
    std::string circuit;
    std::string hamiltonian;
    bool svg = false;
    int trials = 10;
    int maxReps = 0; ///< 0: per-command default
    int order = 0;
    int reps = 0;
    double time = 1.0;
    double p = -1.0;
    double dt = 0.1;
    int iters = 200;
    int steps = 100;
    int depth = 2;
    std::string listen = "127.0.0.1:55055";
};

std::string readFile(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void emit(const Options &o, const std::string &text) {
    if (o.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f || !(f << text)) throw IoError("cannot write " + o.out);
}

std::string real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::unique_ptr<Env> makeEnv(const Options &o) {
    if (o.remote.empty()) return std::make_unique<LocalEnv>(o.seed);
    const auto [host, port] = net::parseEndpoint(o.remote);
    auto env = std::make_unique<RemoteEnv>(host, port);
    env->seedMeasurements(o.seed);
    return env;
}

Circuit loadCircuit(const Options &o) {
    if (o.circuit.empty()) throw Error(ErrorCode::InvalidArgument, "--circuit is required");
    return parseCircuit(readFile(o.circuit));
}

int widthFor(const Options &o, int needed) {
    const int n = o.qubits > 0 ? o.qubits : needed;
    if (n < 1) throw Error(ErrorCode::InvalidQubitCount, "cannot infer the register width; pass --qubits");
    return n;
}

std::string formatAmplitudes(const Options &o, const std::vector<int> &outcomes, const Amplitudes &a) {
    if (o.format == "json") {
        json j;
        j["qubits"] = a.numQubits;
        j["density"] = a.isDensity;
        j["outcomes"] = outcomes;
        json amps = json::array();
        for (const auto &z : a.values) amps.push_back({z.real(), z.imag()});
        j["amplitudes"] = amps;
        return j.dump(2) + "\n";
    }
    std::string out;
    if (!outcomes.empty()) {
        out += "# outcomes";
        for (int v : outcomes) out += " " + std::to_string(v);
        out += "\n";
    }
    const Index d = a.dim();
    out += a.isDensity ? "row,col,re,im\n" : "index,re,im\n";
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const auto idx = static_cast<Index>(i);
        out += a.isDensity ? std::to_string(idx / d) + "," + std::to_string(idx % d) : std::to_string(idx);
        out += "," + real(a.values[i].real()) + "," + real(a.values[i].imag()) + "\n";
    }
    return out;
}

int cmdRun(const Options &o) {
    const Circuit c = loadCircuit(o);
    auto env = makeEnv(o);
    const auto id = env->createQureg(widthFor(o, c.numQubits()), o.density);
    const auto outcomes = env->applyCircuit(id, c);
    emit(o, formatAmplitudes(o, outcomes, env->getQuregMatrix(id)));
    return kOk;
}

int cmdDraw(const Options &o) {
    const Circuit c = loadCircuit(o);
    emit(o, o.svg ? drawCircuitSvg(c) : drawCircuitAscii(c));
    return kOk;
}

int cmdExpect(const Options &o) {
    const Circuit c = loadCircuit(o);
    if (o.hamiltonian.empty()) throw Error(ErrorCode::InvalidArgument, "--hamiltonian is required");
    const PauliSum h = parsePauliSum(readFile(o.hamiltonian));
    auto env = makeEnv(o);
    const int n = widthFor(o, std::max(c.numQubits(), h.numQubits()));
    const auto id = env->createQureg(n, o.density);
    const auto ws = env->createQureg(n, o.density);
    env->applyCircuit(id, c);
    const double v = env->calcExpecPauliSum(id, h, ws);
    emit(o, o.format == "json" ? json{{"expectation", v}}.dump() + "\n" : real(v) + "\n");
    return kOk;
}

int cmdBench(const Options &o) {
    auto env = makeEnv(o);
    std::vector<int> reps;
    for (int r = 1; r <= (o.maxReps > 0 ? o.maxReps : 50); ++r) reps.push_back(r);
    const auto rows = runBenchmark(*env, o.qubits > 0 ? o.qubits : 15, reps, o.trials, o.seed);
    if (o.format == "json") {
        json j = json::array();
        for (const auto &r : rows) {
            j.push_back({{"reps", r.reps}, {"gates", r.gateCount}, {"mean_s", r.meanSeconds},
                         {"stddev_s", r.stddevSeconds}, {"trials", r.trials}});
        }
        emit(o, j.dump(2) + "\n");
    } else {
        emit(o, benchmarkCsv(rows));
    }
    return kOk;
}

int cmdServe(const Options &o) {
    const auto [host, port] = net::parseEndpoint(o.listen);
    Server server(host, port, o.seed);
    server.start();
    std::cerr << "qlink: listening on " << host << ":" << server.port() << std::endl;
    server.wait();
    return kOk;
}

/// Trace distance between a density matrix and the maximally mixed state.
double distanceToMixed(const Amplitudes &a) {
    const CMatrix rho = a.matrix();
    const CMatrix diff = rho - CMatrix::Identity(rho.rows(), rho.cols()) / static_cast<double>(rho.rows());
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(diff);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

int cmdDemoDepol(const Options &o) {
    const double p = o.p < 0 ? 0.1 : o.p;
    const PauliSum h = o.hamiltonian.empty() ? parsePauliSum("Z 0 Z 1 + 0.5 * X 0 + 0.25 * Y 1")
                                             : parsePauliSum(readFile(o.hamiltonian));
    auto env = makeEnv(o);
    const int n = widthFor(o, std::max(2, h.numQubits()));
    const auto rho = env->createQureg(n, true);
    const auto ws = env->createQureg(n, true);
    env->initRandomPure(rho, o.seed);
    Circuit step;
    for (int q = 0; q + 1 < n; q += 2) step.gates.push_back(gates::depol({q, q + 1}, p));
    if (n % 2 == 1) step.gates.push_back(gates::depol({n - 1}, std::min(p, kMaxDepolarising)));
    json rows = json::array();
    std::string csv = "step,expectation,trace_distance\n";
    for (int s = 1; s <= o.steps; ++s) {
        env->applyCircuit(rho, step);
        const double e = env->calcExpecPauliSum(rho, h, ws);
        const double d = distanceToMixed(env->getQuregMatrix(rho));
        csv += std::to_string(s) + "," + real(e) + "," + real(d) + "\n";
        rows.push_back({{"step", s}, {"expectation", e}, {"trace_distance", d}});
    }
    emit(o, o.format == "json" ? rows.dump(2) + "\n" : csv);
    return kOk;
}

int cmdDemoImagTime(const Options &o) {
    if (!o.remote.empty()) {
        throw Error(ErrorCode::Unsupported, "imaginary-time evolution needs derivative states and runs locally only");
    }
    const PauliSum h = o.hamiltonian.empty() ? parsePauliSum("Z 0 Z 1 + 0.5 * X 0")
                                             : parsePauliSum(readFile(o.hamiltonian));
    const int n = widthFor(o, h.numQubits());
    ImagTimeConfig cfg;
    cfg.dt = o.dt;
    cfg.iterations = o.iters;
    cfg.seed = o.seed;
    const Ansatz a = layeredAnsatz(n, o.depth);
    Qureg base(n, false);
    const auto r = runImagTime(a, h, randomParameters(a.numParams, o.seed), cfg, base);
    if (o.format == "json") {
        json j;
        j["energies"] = r.energies;
        j["gradient_norms"] = r.gradientNorms;
        j["theta"] = r.theta;
        if (n <= kDenseQubitCap) {
            const Eigen::SelfAdjointEigenSolver<CMatrix> es(hamiltonianMatrix(h, n));
            j["ground_energy"] = es.eigenvalues()(0);
        }
        emit(o, j.dump(2) + "\n");
        return kOk;
    }
    std::string csv = "iteration,energy,grad_norm\n";
    for (std::size_t k = 0; k < r.energies.size(); ++k) {
        csv += std::to_string(k) + "," + real(r.energies[k]) + "," + real(r.gradientNorms[k]) + "\n";
    }
    emit(o, csv);
    return kOk;
}

int cmdDemoTrotter(const Options &o) {
    const int n = o.qubits > 0 ? o.qubits : 5;
    const PauliSum h = o.hamiltonian.empty() ? heisenbergRing(n, o.seed) : parsePauliSum(readFile(o.hamiltonian));
    std::vector<int> orders = o.order > 0 ? std::vector<int>{o.order} : std::vector<int>{1, 2};
    std::vector<int> reps;
    if (o.reps > 0) {
        reps.push_back(o.reps);
    } else {
        for (int r = 1; r <= (o.maxReps > 0 ? o.maxReps : 64); r *= 2) reps.push_back(r);
    }
    auto env = makeEnv(o);
    const auto rows = trotterSweep(*env, h, o.time, orders, reps, o.p < 0 ? 1e-4 : o.p, deriveSeed(o.seed, 1));
    if (o.format == "json") {
        json j = json::array();
        for (const auto &r : rows) {
            j.push_back({{"order", r.order}, {"reps", r.reps}, {"gateCount", r.gateCount},
                         {"fidelity", r.fidelity}, {"noisyFidelity", r.noisyFidelity}});
        }
        emit(o, j.dump(2) + "\n");
    } else {
        emit(o, trotterCsv(rows));
    }
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qlink: quantum register simulation with local or remote execution"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    if (const char *env = std::getenv("QLINK_REMOTE")) o.remote = env;

    app.add_option("--seed", o.seed, "Seed for every random choice");
    app.add_option("--threads", o.threads, "Cap on kernel threads (0 = all)")->check(CLI::NonNegativeNumber);
    app.add_option("--remote", o.remote, "Run on a server at HOST:PORT (default $QLINK_REMOTE)");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", o.out, "Write output to FILE instead of stdout");

    auto circuitOpts = [&](CLI::App *c) {
        c->add_option("--circuit", o.circuit, "Circuit file (.qc)")->required();
        c->add_option("--qubits", o.qubits, "Register width (default: circuit width)");
        c->add_flag("--density", o.density, "Use a density matrix");
    };

    auto *run = app.add_subcommand("run", "Apply a circuit to |0..0> and print the amplitudes");
    circuitOpts(run);
    auto *draw = app.add_subcommand("draw", "Render a circuit diagram");
    draw->add_option("--circuit", o.circuit, "Circuit file (.qc)")->required();
    draw->add_flag("--svg", o.svg, "Emit SVG instead of text");
    auto *expect = app.add_subcommand("expect", "Expectation value of a Pauli sum after a circuit");
    circuitOpts(expect);
    expect->add_option("--hamiltonian", o.hamiltonian, "Pauli-sum file (.ham)")->required();
    auto *bench = app.add_subcommand("bench", "Time the benchmark circuit for reps = 1..max-reps");
    bench->add_option("--qubits", o.qubits, "Register width (default 15)");
    bench->add_option("--max-reps", o.maxReps, "Largest repetition count (default 50)");
    bench->add_option("--trials", o.trials, "Executions per repetition count")->default_val(10);
    auto *serve = app.add_subcommand("serve", "Host register environments over TCP");
    serve->add_option("--listen", o.listen, "HOST:PORT to bind")->default_val("127.0.0.1:55055");
    auto *depol = app.add_subcommand("demo-depol", "Repeated depolarising noise on a random pure state");
    depol->add_option("--p", o.p, "Depolarising probability (default 0.1)");
    depol->add_option("--steps", o.steps, "Channel applications")->default_val(100);
    depol->add_option("--qubits", o.qubits, "Register width (default 2)");
    depol->add_option("--hamiltonian", o.hamiltonian, "Observable (.ham)");
    auto *imag = app.add_subcommand("demo-imagtime", "Variational imaginary-time ground-state search");
    imag->add_option("--dt", o.dt, "Step size")->default_val(0.1);
    imag->add_option("--iters", o.iters, "Iterations")->default_val(200);
    imag->add_option("--depth", o.depth, "Ansatz layers")->default_val(2);
    imag->add_option("--qubits", o.qubits, "Register width (default: Hamiltonian width)");
    imag->add_option("--hamiltonian", o.hamiltonian, "Hamiltonian (.ham)");
    auto *trot = app.add_subcommand("demo-trotter", "Trotter fidelity sweep, noiseless and noisy");
    trot->add_option("--qubits", o.qubits, "Ring size (default 5)");
    trot->add_option("--hamiltonian", o.hamiltonian, "Hamiltonian (.ham) instead of the random ring");
    trot->add_option("--time", o.time, "Evolution time")->default_val(1.0);
    trot->add_option("--order", o.order, "Single order to sweep (default 1 and 2)");
    trot->add_option("--reps", o.reps, "Single repetition count (default powers of two)");
    trot->add_option("--max-reps", o.maxReps, "Largest power-of-two repetition count (default 64)");
    trot->add_option("--p", o.p, "Depolarising probability per gate (default 1e-4)");

    CLI11_PARSE(app, argc, argv);
    if (o.threads > 0) setNumThreads(o.threads);

    try {
        if (*run) return cmdRun(o);
        if (*draw) return cmdDraw(o);
        if (*expect) return cmdExpect(o);
        if (*bench) return cmdBench(o);
        if (*serve) return cmdServe(o);
        if (*depol) return cmdDemoDepol(o);
        if (*imag) return cmdDemoImagTime(o);
        if (*trot) return cmdDemoTrotter(o);
    } catch (const Error &e) {
        std::cerr << "qlink: " << e.what() << "\n";
        return kValidation;
    } catch (const IoError &e) {
        std::cerr << "qlink: " << e.what() << "\n";
        return kIo;
    } catch (const TransportError &e) {
        std::cerr << "qlink: " << e.what() << "\n";
        return kTransport;
    }
    return kOk;
}
