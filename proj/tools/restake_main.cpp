// Command-line front end: check / divide / savings / generate / aggregate.
//
// Exit codes are a stable contract:
//   0  secure / success
//   1  insecure (a witness is reported)
//   2  input error
//   3  capacity exceeded (instance too large for the exact engines)
//   4  internal error

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "restake/errors.hpp"
#include "restake/generators.hpp"
#include "restake/io.hpp"
#include "restake/savings.hpp"
#include "restake/security.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace restake;

constexpr int kExitSecure = 0;
constexpr int kExitInsecure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitInternal = 4;

std::string show(const Rat& r) {
  if (r.is_integer()) return r.str();
  return r.str() + " (~" + r.decimal() + ")";
}

std::string id_list(const std::vector<NodeId>& ids, const char* prefix) {
  std::string out;
  for (NodeId id : ids) {
    if (!out.empty()) out += ", ";
    out += prefix + std::to_string(id);
  }
  return out.empty() ? "(none)" : out;
}

Json witness_json(const AttackWitness& w) {
  Json j;
  j["coalition"] = w.coalition;
  j["attacked"] = w.attacked;
  j["profit"] = w.profit.str();
  return j;
}

void print_witness(const AttackWitness& w) {
  std::cout << "  coalition: " << id_list(w.coalition, "v") << "\n";
  std::cout << "  attacked services: " << id_list(w.attacked, "s") << "\n";
  std::cout << "  profit: " << show(w.profit) << "\n";
}

void emit_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct CheckArgs {
  std::string input;
  bool sufficient_only = false;
  bool exhaustive = false;
  std::size_t cap = kDefaultEnumerationCap;
};

int run_check(const CheckArgs& args, bool json, bool strict) {
  std::vector<std::string> warnings;
  const GraphDocument doc = parse_graph_document(read_text_file(args.input), strict, &warnings);
  emit_warnings(warnings);

  std::optional<SufficiencyReport> sufficiency;
  std::string sufficiency_note;
  try {
    sufficiency = satisfies_sufficient_condition(doc.graph, doc.stakes);
  } catch (const DegenerateInputError& e) {
    sufficiency_note = e.what();
  }

  std::optional<SecurityVerdict> verdict;
  if (!args.sufficient_only) {
    SecurityOptions opts;
    opts.enumeration_cap = args.cap;
    opts.exhaustive = args.exhaustive;
    verdict = is_secure_exact(doc.graph, doc.stakes, opts);
  }

  if (json) {
    Json out;
    out["command"] = "check";
    out["services"] = doc.graph.num_services();
    out["validators"] = doc.graph.num_validators();
    out["total_stake"] = doc.stakes.total().str();
    out["total_value"] = doc.graph.total_value().str();
    if (verdict) {
      out["secure"] = verdict->secure;
      out["witness"] = verdict->witness ? witness_json(*verdict->witness) : Json(nullptr);
    }
    if (sufficiency) {
      Json s;
      s["holds"] = sufficiency->holds;
      s["slacks"] = Json::array();
      for (const auto& [vid, slack] : sufficiency->slacks) {
        Json e;
        e["validator"] = vid;
        e["slack"] = slack.str();
        s["slacks"].push_back(std::move(e));
      }
      out["sufficiency"] = std::move(s);
    } else {
      out["sufficiency"] = nullptr;
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "graph: " << doc.graph.num_services() << " services, "
              << doc.graph.num_validators() << " validators, " << doc.graph.num_edges()
              << " edges\n";
    std::cout << "total stake T = " << show(doc.stakes.total()) << ", total value = "
              << show(doc.graph.total_value()) << "\n";
    if (verdict) {
      if (verdict->secure) {
        std::cout << "exact check: secure\n";
      } else {
        std::cout << "exact check: INSECURE"
                  << (args.exhaustive ? " (maximum-profit witness)" : "") << "\n";
        print_witness(*verdict->witness);
      }
    }
    if (sufficiency) {
      if (sufficiency->holds) {
        std::cout << "sufficient condition: holds (graph is secure and divisible as-is)\n";
      } else {
        std::cout << "sufficient condition: fails\n";
        for (const auto& [vid, slack] : sufficiency->slacks) {
          if (slack.is_negative())
            std::cout << "  v" << vid << ": slack " << show(slack) << "\n";
        }
      }
    } else {
      std::cout << "sufficient condition: not applicable (" << sufficiency_note << ")\n";
    }
  }

  if (verdict) return verdict->secure ? kExitSecure : kExitInsecure;
  if (sufficiency && sufficiency->holds) return kExitSecure;
  // The condition is one-sided: failing it proves nothing.
  std::cerr << "sufficient condition fails; no exact verdict was requested, so the security "
               "question is unresolved\n";
  return kExitCapacity;
}

struct DivideArgs {
  std::string input;
  std::string method;
  std::string out_path;
  std::size_t cap = kDefaultEnumerationCap;
  std::size_t cover_cap = kDefaultCoverCap;
};

int run_divide(const DivideArgs& args, bool json, bool strict) {
  std::vector<std::string> warnings;
  const GraphDocument doc = parse_graph_document(read_text_file(args.input), strict, &warnings);
  emit_warnings(warnings);
  const Rat total = doc.stakes.total();
  if (!total.is_positive()) throw DegenerateInputError("total stake is zero");

  std::optional<AnalyticCap> cap;
  AugmentedDivision division;
  if (args.method == "proportional") {
    division.method = "proportional";
    division.plan = proportional_division(doc.graph, doc.stakes);  // refuses without Eq-style slack
    division.augmented = doc.stakes;
    division.extra = Rat(0);
    cap = AnalyticCap::rational(Rat(0));
  } else {
    if (doc.graph.num_validators() <= args.cap) {
      const SecurityVerdict verdict = is_secure_exact(doc.graph, doc.stakes, {args.cap});
      if (!verdict.secure)
        throw InsecureInputError("augmentation constructions require a secure graph; profit " +
                                     verdict.witness->profit.str() + " is available",
                                 verdict.witness->coalition);
    } else {
      std::cerr << "note: security not verified (above enumeration cap); the construction's "
                   "guarantees assume it\n";
    }
    if (args.method == "maxdeg") {
      division = construct_maxdeg_augmentation(doc.graph, doc.stakes);
      cap = AnalyticCap::rational(Rat(static_cast<long>(doc.graph.max_service_degree())));
    } else if (args.method == "cover") {
      const CoverResult cover =
          doc.graph.num_services() <= args.cover_cap
              ? compute_cover_K(doc.graph, CoverMode::Exact, args.cover_cap)
              : compute_cover_K(doc.graph, CoverMode::Greedy, args.cover_cap);
      division = construct_cover_augmentation(doc.graph, doc.stakes, cover);
      cap = AnalyticCap::rational(Rat(static_cast<long>(cover.incidence)));
    } else if (args.method == "sqrt") {
      division = construct_sqrt_augmentation(doc.graph, doc.stakes);
      cap = AnalyticCap::two_sqrt_n_minus_one(doc.graph.num_validators());
    } else if (args.method == "alpha") {
      division = construct_alpha_augmentation(doc.graph, doc.stakes);
      if (doc.graph.num_services() >= 2) {
        std::vector<Rat> alphas;
        for (const ServiceSpec& s : doc.graph.services()) alphas.push_back(s.alpha);
        std::sort(alphas.begin(), alphas.end());
        cap = AnalyticCap::rational(Rat(1) / alphas[1]);
      }
    }
  }

  const DivisionCheck check = verify_division(doc.graph, division.augmented, division.plan, args.cap);
  if (!check.ok) throw std::logic_error("construction failed verification; this is a bug");
  const Rat ratio = division.extra / total;

  if (!args.out_path.empty()) write_text_file(args.out_path, serialize_plan_document(division));

  if (json) {
    Json out;
    out["command"] = "divide";
    out["method"] = division.method;
    out["extra"] = division.extra.str();
    out["ratio"] = ratio.str();
    out["cap"] = cap ? Json(cap->str()) : Json(nullptr);
    out["cap_holds"] = cap ? Json(cap->admits(ratio)) : Json(nullptr);
    out["verified"] = true;
    if (!division.selected_services.empty())
      out["selected_services"] = division.selected_services;
    if (!division.notes.empty()) out["notes"] = division.notes;
    out["plan"] = Json::parse(serialize_plan_document(division));
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "method: " << division.method << "\n";
    if (!division.selected_services.empty())
      std::cout << (division.method == "sqrt" ? "greedy layer: " : "cover: ")
                << id_list(division.selected_services, "s") << "\n";
    std::cout << "extra stake: " << show(division.extra) << " (ratio " << show(ratio)
              << " of T = " << show(total) << ")\n";
    if (cap)
      std::cout << "analytic cap: " << cap->str() << (cap->admits(ratio) ? " (holds)" : " (VIOLATED)")
                << "\n";
    for (const std::string& note : division.notes) std::cout << "note: " << note << "\n";
    std::cout << "verification: all " << doc.graph.num_services() << " services secure\n";
    if (!args.out_path.empty()) std::cout << "plan written to " << args.out_path << "\n";
  }
  return kExitSecure;
}

struct SavingsArgs {
  std::string input;
  std::string kind;
  bool oracle = false;
  std::string granularity = "1";
  std::string budget;
  std::size_t cap = kDefaultEnumerationCap;
};

int run_savings_rs(const SavingsArgs& args, bool json, bool strict) {
  std::vector<std::string> warnings;
  const GraphDocument doc = parse_graph_document(read_text_file(args.input), strict, &warnings);
  emit_warnings(warnings);

  RSOptions options;
  options.enumeration_cap = args.cap;
  options.run_oracle = args.oracle;
  options.oracle_granularity = Rat::parse(args.granularity);
  if (!args.budget.empty()) options.oracle_budget = Rat::parse(args.budget);
  if (doc.family && doc.family->tag == "rs-lower" && doc.family->m >= 2)
    options.family_m = doc.family->m;

  const RSReport report = rs_upper_bounds(doc.graph, doc.stakes, options);

  if (json) {
    Json out;
    out["command"] = "savings";
    out["kind"] = "rs";
    out["total_stake"] = report.total_stake.str();
    out["bounds"] = Json::array();
    for (const MethodBound& b : report.bounds) {
      Json j;
      j["method"] = b.method;
      j["extra"] = b.extra.str();
      j["ratio"] = b.ratio.str();
      j["cap"] = b.cap ? Json(b.cap->str()) : Json(nullptr);
      j["cap_holds"] = b.cap_holds;
      out["bounds"].push_back(std::move(j));
    }
    out["best_upper"] = report.best_upper ? Json(report.best_upper->str()) : Json(nullptr);
    if (report.family_lower) out["family_lower"] = report.family_lower->str();
    if (args.oracle)
      out["oracle"] = report.oracle_value ? Json(report.oracle_value->str()) : Json(nullptr);
    if (!report.notes.empty()) out["notes"] = report.notes;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "total stake T = " << show(report.total_stake) << "\n";
    std::cout << "constructive upper bounds on the restaking savings:\n";
    for (const MethodBound& b : report.bounds) {
      std::cout << "  " << b.method << ": extra " << show(b.extra) << ", ratio " << show(b.ratio);
      if (b.cap) std::cout << ", cap " << b.cap->str() << (b.cap_holds ? "" : " VIOLATED");
      std::cout << "\n";
    }
    if (report.best_upper)
      std::cout << "best constructive upper bound: " << show(*report.best_upper) << "\n";
    if (report.family_lower)
      std::cout << "family lower bound: " << show(*report.family_lower) << "\n";
    if (args.oracle) {
      if (report.oracle_value)
        std::cout << "grid oracle: " << show(*report.oracle_value) << "\n";
      else
        std::cout << "grid oracle: no division found within budget\n";
    }
    for (const std::string& note : report.notes) std::cout << "note: " << note << "\n";
  }
  return kExitSecure;
}

int run_savings_poss(const SavingsArgs& args, bool json, bool strict) {
  std::vector<std::string> warnings;
  const PosDocument doc = parse_pos_document(read_text_file(args.input), strict, &warnings);
  emit_warnings(warnings);

  auto [graph, stakes] = aggregate_pos(doc.protocols);

  PoSSOptions options;
  options.enumeration_cap = args.cap;
  options.run_oracle = args.oracle;
  options.oracle_granularity = Rat::parse(args.granularity);
  if (!args.budget.empty()) options.oracle_budget = Rat::parse(args.budget);

  const PoSSReport report = poss_analysis(graph, stakes, options);

  if (json) {
    Json out;
    out["command"] = "savings";
    out["kind"] = "poss";
    out["services"] = graph.num_services();
    out["validators"] = graph.num_validators();
    out["total_stake"] = report.total_stake.str();
    out["total_value"] = report.total_value.str();
    out["lemma_holds"] = report.lemma_holds;
    out["aggregated_secure"] = report.aggregated_secure;
    out["witness"] = report.witness ? witness_json(*report.witness) : Json(nullptr);
    out["construction_extra"] = report.construction_extra.str();
    out["construction_ratio"] = report.construction_ratio.str();
    out["construction_cap"] = report.construction_cap.str();
    out["construction_verified"] = report.construction_verified;
    if (args.oracle) {
      out["oracle"] = report.oracle_value ? Json(report.oracle_value->str()) : Json(nullptr);
      out["oracle_extra"] = report.oracle_extra ? Json(report.oracle_extra->str()) : Json(nullptr);
    }
    if (!report.notes.empty()) out["notes"] = report.notes;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "aggregate: " << graph.num_services() << " services, " << graph.num_validators()
              << " validators, T = " << show(report.total_stake) << ", total value = "
              << show(report.total_value) << "\n";
    std::cout << "T(sigma) >= T(pi): " << (report.lemma_holds ? "holds" : "VIOLATED") << "\n";
    if (report.aggregated_secure) {
      std::cout << "aggregate exact check: secure (PoS savings 0)\n";
    } else if (report.witness) {
      std::cout << "aggregate exact check: INSECURE\n";
      print_witness(*report.witness);
    }
    std::cout << "upper construction: extra " << show(report.construction_extra) << ", ratio "
              << show(report.construction_ratio) << ", cap " << report.construction_cap.str()
              << (report.construction_verified ? ", verified secure" : "") << "\n";
    if (args.oracle) {
      if (report.oracle_value)
        std::cout << "grid oracle: extra " << show(*report.oracle_extra) << ", ratio "
                  << show(*report.oracle_value) << "\n";
      else
        std::cout << "grid oracle: nothing within budget makes the aggregate secure\n";
    }
    for (const std::string& note : report.notes) std::cout << "note: " << note << "\n";
  }
  return kExitSecure;
}

struct GenerateArgs {
  std::string family;
  std::uint32_t m = 3;
  std::string out_path;
  RandomSpec random;
  std::string force = "none";
};

int run_generate(const GenerateArgs& args, bool json) {
  std::string text;
  std::size_t services = 0, validators = 0;
  Rat total_sigma, total_pi;

  if (args.family == "rs-lower") {
    auto [graph, stakes] = gen_rs_lower_family(args.m);
    text = serialize_graph_document(graph, stakes, FamilyInfo{"rs-lower", args.m});
    services = graph.num_services();
    validators = graph.num_validators();
    total_sigma = stakes.total();
    total_pi = graph.total_value();
  } else if (args.family == "poss-lower") {
    auto protocols = gen_poss_lower_family(args.m);
    text = serialize_pos_document(protocols, FamilyInfo{"poss-lower", args.m});
    services = protocols.size();
    validators = args.m + 1;
    for (const PoSProtocol& p : protocols) {
      total_sigma += p.instance.total();
      total_pi += p.instance.value();
    }
  } else {  // random
    RandomSpec spec = args.random;
    if (args.force == "secure")
      spec.force = ForceMode::Secure;
    else if (args.force == "sufficient")
      spec.force = ForceMode::Sufficient;
    else if (args.force != "none")
      throw InputError("unknown force mode '" + args.force + "'");
    GeneratedInstance inst = gen_random(spec);
    text = serialize_graph_document(inst.graph, inst.stakes);
    services = inst.graph.num_services();
    validators = inst.graph.num_validators();
    total_sigma = inst.stakes.total();
    total_pi = inst.graph.total_value();
    if (inst.scale_exponent > 0)
      std::cerr << "note: stakes scaled by 2^" << inst.scale_exponent
                << " to reach the sufficient condition\n";
  }

  if (!args.out_path.empty())
    write_text_file(args.out_path, text);
  else
    std::cout << text;

  if (json) {
    Json out;
    out["command"] = "generate";
    out["family"] = args.family;
    out["services"] = services;
    out["validators"] = validators;
    out["total_stake"] = total_sigma.str();
    out["total_value"] = total_pi.str();
    if (!args.out_path.empty()) out["path"] = args.out_path;
    std::cerr << out.dump(2) << "\n";
  } else {
    std::cerr << (args.out_path.empty() ? "generated" : "wrote " + args.out_path) << ": "
              << services << " services, " << validators << " validators, T(sigma) = "
              << show(total_sigma) << ", T(pi) = " << show(total_pi) << "\n";
  }
  return kExitSecure;
}

struct AggregateArgs {
  std::string input;
  std::string out_path;
  std::size_t cap = kDefaultEnumerationCap;
};

int run_aggregate(const AggregateArgs& args, bool json, bool strict) {
  std::vector<std::string> warnings;
  const PosDocument doc = parse_pos_document(read_text_file(args.input), strict, &warnings);
  emit_warnings(warnings);

  auto [graph, stakes] = aggregate_pos(doc.protocols);
  const bool lemma = check_stake_value_inequality(graph, stakes);

  std::optional<SecurityVerdict> verdict;
  if (graph.num_validators() <= args.cap)
    verdict = is_secure_exact(graph, stakes, {args.cap});

  if (!args.out_path.empty())
    write_text_file(args.out_path, serialize_graph_document(graph, stakes));

  if (json) {
    Json out;
    out["command"] = "aggregate";
    out["services"] = graph.num_services();
    out["validators"] = graph.num_validators();
    out["total_stake"] = stakes.total().str();
    out["total_value"] = graph.total_value().str();
    out["lemma_holds"] = lemma;
    if (verdict) {
      out["secure"] = verdict->secure;
      out["witness"] = verdict->witness ? witness_json(*verdict->witness) : Json(nullptr);
    }
    if (!args.out_path.empty()) out["path"] = args.out_path;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "aggregated " << doc.protocols.size() << " protocols: " << graph.num_services()
              << " services, " << graph.num_validators() << " validators\n";
    std::cout << "T(sigma) = " << show(stakes.total()) << " >= T(pi) = "
              << show(graph.total_value()) << ": " << (lemma ? "holds" : "VIOLATED") << "\n";
    if (verdict) {
      if (verdict->secure) {
        std::cout << "exact check: secure\n";
      } else {
        std::cout << "exact check: INSECURE\n";
        print_witness(*verdict->witness);
      }
    } else {
      std::cout << "exact check: skipped (above enumeration cap)\n";
    }
    if (!args.out_path.empty()) std::cout << "wrote " << args.out_path << "\n";
  }
  return kExitSecure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cryptoeconomic security analysis for restaking graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  bool json = false;
  bool strict = false;
  app.add_flag("--json", json, "emit machine-readable JSON reports");
  app.add_flag("--strict", strict, "reject unknown fields in input files");

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "decide security of a restaking graph");
  check->add_option("input", check_args.input, "graph file")->required();
  check->add_flag("--sufficient-only", check_args.sufficient_only,
                  "evaluate only the linear-time sufficient condition");
  check->add_flag("--exhaustive", check_args.exhaustive,
                  "report the maximum-profit coalition instead of the first");
  check->add_option("--cap", check_args.cap, "exact-enumeration validator cap");

  DivideArgs divide_args;
  auto* divide = app.add_subcommand("divide", "build a stake division or augmentation plan");
  divide->add_option("input", divide_args.input, "graph file")->required();
  divide
      ->add_option("--method", divide_args.method,
                   "proportional | maxdeg | cover | sqrt | alpha")
      ->required()
      ->check(CLI::IsMember({"proportional", "maxdeg", "cover", "sqrt", "alpha"}));
  divide->add_option("--out", divide_args.out_path, "write the plan file here");
  divide->add_option("--cap", divide_args.cap, "exact-enumeration validator cap");

  SavingsArgs savings_args;
  auto* savings = app.add_subcommand("savings", "bound restaking or PoS savings");
  savings->add_option("input", savings_args.input, "graph file (rs) or protocol file (poss)")
      ->required();
  savings->add_option("--kind", savings_args.kind, "rs | poss")
      ->required()
      ->check(CLI::IsMember({"rs", "poss"}));
  savings->add_flag("--oracle", savings_args.oracle, "run the grid-search oracle");
  savings->add_option("--granularity", savings_args.granularity, "oracle grid step (default 1)");
  savings->add_option("--budget", savings_args.budget,
                      "oracle budget on total added stake (default: the constructive extra)");
  savings->add_option("--cap", savings_args.cap, "exact-enumeration validator cap");

  GenerateArgs gen_args;
  auto* generate = app.add_subcommand("generate", "emit a family or seeded random instance");
  generate->add_option("--family", gen_args.family, "rs-lower | poss-lower | random")
      ->required()
      ->check(CLI::IsMember({"rs-lower", "poss-lower", "random"}));
  generate->add_option("--m", gen_args.m, "family parameter m");
  generate->add_option("--out", gen_args.out_path, "output file (default: stdout)");
  generate->add_option("--services", gen_args.random.num_services, "random: service count");
  generate->add_option("--validators", gen_args.random.num_validators, "random: validator count");
  generate->add_option("--density", gen_args.random.density_percent, "random: edge density %");
  generate->add_option("--seed", gen_args.random.seed, "random: seed");
  generate->add_option("--stake-max", gen_args.random.stake_max, "random: stake upper bound");
  generate->add_option("--value-max", gen_args.random.value_max, "random: value upper bound");
  generate->add_option("--force", gen_args.force, "random: none | secure | sufficient");

  AggregateArgs agg_args;
  auto* aggregate = app.add_subcommand("aggregate", "merge secure PoS protocols into one graph");
  aggregate->add_option("input", agg_args.input, "protocol file")->required();
  aggregate->add_option("--out", agg_args.out_path, "write the aggregated graph here");
  aggregate->add_option("--cap", agg_args.cap, "exact-enumeration validator cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*check) return run_check(check_args, json, strict);
    if (*divide) return run_divide(divide_args, json, strict);
    if (*savings)
      return savings_args.kind == "rs" ? run_savings_rs(savings_args, json, strict)
                                       : run_savings_poss(savings_args, json, strict);
    if (*generate) return run_generate(gen_args, json);
    if (*aggregate) return run_aggregate(agg_args, json, strict);
  } catch (const InsecureInputError& e) {
    std::cerr << "insecure input: " << e.what() << "\n";
    std::cerr << "  coalition: " << id_list(e.coalition(), "v") << "\n";
    return kExitInsecure;
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    for (const std::string& issue : e.issues()) std::cerr << "  " << issue << "\n";
    return kExitInputError;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
