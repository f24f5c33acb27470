#include "pqip/transport.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>
#include <random>

using namespace pqip;

namespace {

enum Exit { kAccept = 0, kReject = 1, kUsage = 2, kChannel = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string load(const std::string& path) {
  try {
    return read_file(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

/// A circuit file, or an instance file whose circuit (and input) we take.
struct CircuitInput {
  Circuit circuit;
  std::optional<QcmaInstance> instance;
};

CircuitInput load_circuit(const std::string& path) {
  const auto text = load(path);
  try {
    return {parse_circuit(text), std::nullopt};
  } catch (const ParseError& first) {
    try {
      auto inst = parse_instance(text);
      return {inst.circuit(), inst};
    } catch (const ParseError&) {
      throw UsageError(path + ": " + first.what());
    }
  }
}

QcmaInstance load_instance(const std::string& path) {
  try {
    return parse_instance(load(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Seed resolve_seed(const std::string& hex) {
  if (!hex.empty()) {
    try {
      return parse_seed(hex);
    } catch (const std::exception&) {
      throw UsageError("--seed must be 64 hex characters");
    }
  }
  Seed s{};
  std::random_device rd;
  for (auto& b : s) b = static_cast<std::uint8_t>(rd());
  std::cerr << "seed " << to_hex(std::span<const std::uint8_t>(s)) << '\n';
  return s;
}

FieldSpec resolve_field(const std::string& p) {
  try {
    return p.empty() ? FieldSpec::mersenne61() : FieldSpec::parse(p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--field: ") + e.what());
  }
}

QcmaStrategy resolve_cheat(const std::string& name) {
  if (name.empty()) return QcmaStrategy::Honest;
  auto s = qcma_strategy_from_name(name);
  if (!s) throw UsageError("unknown --cheat strategy '" + name + "'");
  return *s;
}

int exit_for(bool accept, Reason reason) {
  if (accept) return kAccept;
  return reason == Reason::Channel || reason == Reason::Mismatch ? kChannel : kReject;
}

template <PrimeField F>
std::string result_record(const Decision<F>& d, const std::string& transcript) {
  nlohmann::json j{{"accept", d.accept}, {"reason", std::string(reason_code(d.reason))}};
  j["witness"] = d.witness ? nlohmann::json(*d.witness) : nlohmann::json(nullptr);
  j["transcript"] = transcript.empty() ? nlohmann::json(nullptr) : nlohmann::json(transcript);
  return j.dump();
}

template <PrimeField F>
void save_transcript(const std::string& path, const SessionHeader& h, const F& field, const std::vector<Message<F>>& msgs) {
  if (!path.empty()) write_file(path, transcript_text(h, field, msgs));
}

// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string circuit, input, witness;
};

int cmd_simulate(const SimulateOpts& o) {
  const auto ci = load_circuit(o.circuit);
  Bits x = o.input;
  if (x.empty() && ci.instance) x = ci.instance->input();
  const auto p = acceptance_probability(ci.circuit, x, o.witness);
  std::cout << "acceptance " << p.str() << '\n'
            << "approx " << p.to_double() << '\n'
            << "hadamards " << ci.circuit.hadamard_count() << '\n';
  return kAccept;
}

struct ThresholdOpts {
  std::string circuit, c;
};

int cmd_thresholds(const ThresholdOpts& o) {
  const auto ci = load_circuit(o.circuit);
  Rational c;
  try {
    c = parse_rational(o.c);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--c: ") + e.what());
  }
  Thresholds t;
  try {
    t = compute_exact_thresholds(c, ci.circuit.hadamard_count());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--c: ") + e.what());
  }
  std::cout << "c* " << t.c_star.str() << '\n' << "s* " << t.s_star.str() << '\n' << "h " << t.h << '\n';
  return kAccept;
}

int cmd_search(const std::string& path) {
  const auto inst = load_instance(path);
  const auto r = adaptive_witness_search(inst);
  std::cout << "witness " << (r.witness ? *r.witness : "none") << '\n' << "queries " << r.queries << '\n';
  if (r.witness) std::cout << "acceptance " << acceptance_probability(inst.circuit(), inst.input(), *r.witness).str() << '\n';
  return r.witness ? kAccept : kReject;
}

struct RunOpts {
  std::string instance, cheat, seed, field, transcript;
  std::uint64_t prover_seed = 0;
  // remote endpoints
  std::string listen, connect;
  bool stdio = false;
  double timeout = 30;
};

int cmd_run(const RunOpts& o) {
  const auto inst = load_instance(o.instance);
  const auto strategy = resolve_cheat(o.cheat);
  const auto spec = resolve_field(o.field);
  const auto seed = resolve_seed(o.seed);
  return with_field(spec, [&](const auto& field) {
    using F = std::decay_t<decltype(field)>;
    Decision<F> d;
    try {
      d = run_precise_qcma_protocol(inst, strategy, seed, field, o.prover_seed);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    save_transcript(o.transcript, make_session_header(inst, spec, seed), field, d.transcript);
    std::cout << result_record(d, o.transcript) << '\n';
    return exit_for(d.accept, d.reason);
  });
}

std::chrono::milliseconds timeout_of(const RunOpts& o) {
  return std::chrono::milliseconds(static_cast<long long>(o.timeout * 1000));
}

FdChannel open_channel(const RunOpts& o) {
  const int modes = (o.stdio ? 1 : 0) + (o.listen.empty() ? 0 : 1) + (o.connect.empty() ? 0 : 1);
  if (modes != 1) throw UsageError("choose exactly one of --stdio, --listen, --connect");
  const auto t = timeout_of(o);
  if (o.stdio) return FdChannel(STDIN_FILENO, STDOUT_FILENO, false, t);
  Endpoint e;
  try {
    e = parse_endpoint(o.listen.empty() ? o.connect : o.listen);
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  if (!o.connect.empty()) return tcp_connect(e, t);
  TcpListener l(e);
  std::cerr << "listening on port " << l.port() << '\n';
  return l.accept(t);
}

int cmd_verify(const RunOpts& o) {
  const auto inst = load_instance(o.instance);
  const auto spec = resolve_field(o.field);
  const auto seed = resolve_seed(o.seed);
  if (!spec.embeds(inst.circuit().hadamard_count())) throw UsageError("field too small for this circuit");
  std::ostream& out = o.stdio ? std::cerr : std::cout;
  return with_field(spec, [&](const auto& field) {
    using F = std::decay_t<decltype(field)>;
    Decision<F> d;
    try {
      auto ch = open_channel(o);
      d = run_remote_verifier(inst, field, seed, ch);
    } catch (const ChannelError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return int(kChannel);
    }
    save_transcript(o.transcript, make_session_header(inst, spec, seed), field, d.transcript);
    out << result_record(d, o.transcript) << '\n';
    return exit_for(d.accept, d.reason);
  });
}

int cmd_prove(const RunOpts& o) {
  const auto inst = load_instance(o.instance);
  const auto spec = resolve_field(o.field);
  const auto strategy = resolve_cheat(o.cheat);
  return with_field(spec, [&](const auto& field) {
    using F = std::decay_t<decltype(field)>;
    std::optional<FinalVerdict> v;
    try {
      auto ch = open_channel(o);
      QcmaProver<F> prover(inst, field, strategy, o.prover_seed);
      v = serve_prover(prover, field, ch);
    } catch (const ChannelError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return int(kChannel);
    }
    if (!v) return int(kChannel);
    std::cerr << "verdict " << (v->accept ? "accept" : "reject") << ' ' << reason_code(v->reason) << '\n';
    return exit_for(v->accept, v->reason);
  });
}

struct QmaOpts {
  std::string circuit, input, cheat, seed, field, transcript;
  std::uint64_t prover_seed = 0;
};

int cmd_qma(const QmaOpts& o) {
  const auto ci = load_circuit(o.circuit);
  Bits x = o.input;
  if (x.empty() && ci.instance) x = ci.instance->input();
  check_bits(x, ci.circuit.input_size(), "input bits");
  Strategy strategy = Strategy::Honest;
  if (!o.cheat.empty()) {
    auto s = strategy_from_name(o.cheat);
    if (!s) throw UsageError("unknown --cheat strategy '" + o.cheat + "'");
    strategy = *s;
  }
  if (ci.circuit.witness_size() == 0) throw UsageError("qma needs a circuit with witness qubits");
  const auto spec = resolve_field(o.field);
  const auto seed = resolve_seed(o.seed);
  if (!spec.embeds(ci.circuit.hadamard_count() + ci.circuit.witness_size())) throw UsageError("field too small for this circuit");
  return with_field(spec, [&](const auto& field) {
    const auto out = qma_decision(ci.circuit, x, seed, field, strategy, o.prover_seed);
    SessionHeader h;
    h.mode = "qma";
    h.circuit = print_circuit(ci.circuit);
    h.circuit_hash = circuit_hash(ci.circuit);
    h.input = x;
    h.field = spec.modulus.str();
    h.seed = to_hex(std::span<const std::uint8_t>(seed));
    h.sid = session_id(seed, h.circuit_hash);
    save_transcript(o.transcript, h, field, out.decision.transcript);
    const auto m = ci.circuit.witness_size();
    std::cout << "purified-acceptance " << out.purified_acceptance.str() << '\n'
              << "threshold 1/2^" << (m + 1) << '\n'
              << result_record(out.decision, o.transcript) << '\n';
    return exit_for(out.decision.accept, out.decision.reason);
  });
}

int cmd_replay(const std::string& path) {
  const auto lines = split_lines(load(path));
  if (lines.empty()) throw UsageError(path + ": empty transcript");
  SessionHeader h;
  try {
    h = decode_session_header(lines[0]);
  } catch (const DecodeError& e) {
    throw UsageError(path + ": " + e.what());
  }
  const auto spec = resolve_field(h.field);
  Seed seed;
  try {
    seed = parse_seed(h.seed);
  } catch (const std::exception&) {
    throw UsageError(path + ": bad seed in session header");
  }
  return with_field(spec, [&](const auto& field) {
    using F = std::decay_t<decltype(field)>;
    WireCodec<F> codec(field, h.sid);
    std::vector<Message<F>> msgs;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      try {
        msgs.push_back(codec.decode(lines[i]));
      } catch (const DecodeError& e) {
        throw UsageError(path + ": line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
    ReplayResult<F> r;
    try {
      if (h.mode == "qma") {
        r = replay_qma(parse_circuit(h.circuit), h.input, field, seed, msgs);
      } else if (h.mode == "qcma") {
        const auto inst = parse_instance("input " + h.input + "\ncompleteness " + h.completeness + "\n" + h.circuit);
        r = replay_qcma(inst, field, seed, msgs);
      } else {
        throw UsageError(path + ": unknown session mode '" + h.mode + "'");
      }
    } catch (const ParseError& e) {
      throw UsageError(path + ": embedded circuit: " + e.what());
    } catch (const std::invalid_argument& e) {
      throw UsageError(path + ": " + e.what());
    }
    if (!r.matches) {
      std::cout << "replay diverges from the recorded transcript\n";
      return int(kReject);
    }
    std::cout << "replay ok\n" << result_record(r.decision, path) << '\n';
    return exit_for(r.decision.accept, r.decision.reason);
  });
}

void add_remote_opts(CLI::App* cmd, RunOpts& o) {
  cmd->add_option("--listen", o.listen, "accept one TCP connection on host:port");
  cmd->add_option("--connect", o.connect, "connect to host:port");
  cmd->add_flag("--stdio", o.stdio, "exchange frames over stdin/stdout");
  cmd->add_option("--timeout", o.timeout, "seconds to wait for each message")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulation and interactive verification of precise QCMA instances"};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "exact acceptance probability of a circuit");
  simulate->add_option("circuit", sim.circuit)->required();
  simulate->add_option("--input", sim.input, "input bits");
  simulate->add_option("--witness", sim.witness, "witness bits");

  ThresholdOpts th;
  auto* thresholds = app.add_subcommand("thresholds", "dyadic thresholds c* and s*");
  thresholds->add_option("circuit", th.circuit)->required();
  thresholds->add_option("--c", th.c, "completeness num/den")->required();

  std::string search_path;
  auto* search = app.add_subcommand("search", "adaptive witness search");
  search->add_option("instance", search_path)->required();

  RunOpts run;
  auto* run_cmd = app.add_subcommand("run", "run the protocol with an in-process prover");
  run_cmd->add_option("instance", run.instance)->required();
  run_cmd->add_option("--cheat", run.cheat, "inflate | wrong-claim | perturb | garbage | bad-shape");
  run_cmd->add_option("--seed", run.seed, "verifier seed, 64 hex characters");
  run_cmd->add_option("--field", run.field, "prime modulus (decimal)");
  run_cmd->add_option("--transcript", run.transcript, "write an NDJSON transcript here");
  run_cmd->add_option("--prover-seed", run.prover_seed, "randomness for cheating provers");

  RunOpts ver;
  auto* verify = app.add_subcommand("verify", "verifier endpoint");
  verify->add_option("instance", ver.instance)->required();
  verify->add_option("--seed", ver.seed, "verifier seed, 64 hex characters");
  verify->add_option("--field", ver.field, "prime modulus (decimal)");
  verify->add_option("--transcript", ver.transcript, "write an NDJSON transcript here");
  add_remote_opts(verify, ver);

  RunOpts prv;
  auto* prove = app.add_subcommand("prove", "prover endpoint");
  prove->add_option("instance", prv.instance)->required();
  prove->add_option("--cheat", prv.cheat, "inflate | wrong-claim | perturb | garbage | bad-shape");
  prove->add_option("--field", prv.field, "prime modulus (decimal)");
  prove->add_option("--prover-seed", prv.prover_seed, "randomness for cheating provers");
  add_remote_opts(prove, prv);

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "re-check a transcript file");
  replay->add_option("transcript", replay_path)->required();

  QmaOpts qma;
  auto* qma_cmd = app.add_subcommand("qma", "decide a gapped QMA circuit with a maximally mixed witness");
  qma_cmd->add_option("circuit", qma.circuit)->required();
  qma_cmd->add_option("--input", qma.input, "input bits");
  qma_cmd->add_option("--cheat", qma.cheat, "wrong-claim | perturb | garbage");
  qma_cmd->add_option("--seed", qma.seed, "verifier seed, 64 hex characters");
  qma_cmd->add_option("--field", qma.field, "prime modulus (decimal)");
  qma_cmd->add_option("--transcript", qma.transcript, "write an NDJSON transcript here");
  qma_cmd->add_option("--prover-seed", qma.prover_seed, "randomness for cheating provers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*thresholds) return cmd_thresholds(th);
    if (*search) return cmd_search(search_path);
    if (*run_cmd) return cmd_run(run);
    if (*verify) return cmd_verify(ver);
    if (*prove) return cmd_prove(prv);
    if (*replay) return cmd_replay(replay_path);
    if (*qma_cmd) return cmd_qma(qma);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ChannelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kChannel;
  }
  return kUsage;
}
