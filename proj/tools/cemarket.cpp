// Batch front end: loads market files, runs the solvers and checkers, and
// emits equilibria, traces, and reports with deterministic formatting.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ce/auction.hpp"
#include "ce/io.hpp"
#include "ce/lattice.hpp"
#include "ce/mechanisms.hpp"
#include "ce/solver.hpp"
#include "ce/verification.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitVerification = 3;
constexpr int kExitSizeLimit = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ce::ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ce::MarketDocument load(const std::string& path) {
  ce::MarketDocument doc = ce::load_market_document(path);
  int size = doc.market.num_buyers() + doc.market.num_goods();
  if (size > 12)
    std::fprintf(stderr,
                 "note: %d agents; the inductive solve enumerates "
                 "submarkets and will be slow\n",
                 size);
  return doc;
}

void write_trace_file(const ce::AuctionTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ce::ParseError("cannot open " + path + " for writing");
  ce::write_trace_csv(trace, out);
}

void print_auction_summary(const ce::AuctionTrace& trace) {
  std::printf("{\n  \"terminated\": %s,\n  \"steps\": %ld,\n"
              "  \"demand_change_count\": %d,\n  \"final_prices\": [",
              trace.terminated ? "true" : "false",
              trace.samples.back().first, trace.demand_change_count);
  const ce::PriceVector& p = trace.samples.back().second;
  for (size_t j = 0; j < p.size(); ++j)
    std::printf("%s%.9f", j ? ", " : "", p[j]);
  std::printf("]\n}\n");
}

int run_verify(const std::string& market_path, const std::string& eq_path) {
  ce::MarketDocument doc = load(market_path);
  ce::Equilibrium eq =
      ce::equilibrium_from_json(read_file(eq_path), doc.market);
  ce::VerifyReport rep = ce::verify_equilibrium(eq);
  if (rep.pass) {
    std::printf("pass\n");
    return 0;
  }
  for (const ce::Violation& v : rep.violations) {
    std::printf("violated %s", ce::condition_name(v.condition));
    if (v.buyer >= 0)
      std::printf(" buyer=%s", doc.market.buyers()[v.buyer].c_str());
    if (v.good >= 0)
      std::printf(" good=%s", doc.market.goods()[v.good].c_str());
    std::printf(" magnitude=%.9f\n", v.magnitude);
  }
  return kExitVerification;
}

int run_check(const std::string& suite, const std::string& market_path) {
  ce::MarketDocument doc = load(market_path);
  const ce::Market& m = doc.market;
  bool ok = true;
  if (suite == "tightness") {
    ce::Equilibrium lo = ce::solve_lowest(m);
    ce::Equilibrium hi = ce::solve_highest(m);
    ce::TightnessReport a = ce::tightness_check(lo, ce::Side::Lowest);
    ce::TightnessReport b = ce::tightness_check(hi, ce::Side::Highest);
    std::printf("tightness lowest: %s\n", a.pass ? "pass" : "fail");
    std::printf("tightness highest: %s\n", b.pass ? "pass" : "fail");
    ok = a.pass && b.pass;
  } else if (suite == "structure") {
    std::vector<ce::Equilibrium> family = {ce::solve_lowest(m),
                                           ce::solve_highest(m)};
    for (double t : {0.25, 0.5, 0.75})
      family.push_back(ce::interpolate_continuum(m, t));
    ce::StructureReport rep = ce::structure_checks(family);
    std::printf("structure checks: %s\n", rep.pass ? "pass" : "fail");
    for (const std::string& v : rep.violations)
      std::printf("  %s\n", v.c_str());
    ok = rep.pass;
  } else if (suite == "vcg") {
    if (!m.all_quasilinear())
      throw ce::ValidationError("vcg suite needs a quasilinear market");
    std::vector<std::vector<double>> values(m.num_buyers());
    for (int i = 0; i < m.num_buyers(); ++i)
      for (int j = 0; j < m.num_goods(); ++j)
        values[i].push_back(m.at(i, j).quasilinear_value());
    ce::VcgOutcome vcg = ce::vcg_oracle(values);
    ce::Equilibrium lo = ce::solve_lowest(m);
    std::vector<double> expected(m.num_goods(), 0.0);
    for (int i = 0; i < m.num_buyers(); ++i)
      if (vcg.assignment.good_of(i) >= 0)
        expected[vcg.assignment.good_of(i)] = vcg.payments[i];
    double worst = 0.0;
    for (int j = 0; j < m.num_goods(); ++j)
      worst = std::max(worst, std::abs(lo.prices[j] - expected[j]));
    ok = worst <= ce::kEpsEq;
    std::printf("vcg price agreement: %s (max deviation %.9f)\n",
                ok ? "pass" : "fail", worst);
  } else if (suite == "strategyproof") {
    ce::MisreportGrid grid;
    for (int a = 0; a < m.num_buyers() && ok; ++a) {
      ce::ProbeReport rep = ce::strategyproof_probe(m, {a}, grid);
      std::printf("coalition {%s}: %s (%lld misreports)\n",
                  m.buyers()[a].c_str(), rep.pass ? "pass" : "fail",
                  rep.misreports_tested);
      ok = ok && rep.pass;
      for (int b = a + 1; b < m.num_buyers() && ok; ++b) {
        ce::ProbeReport rep2 = ce::strategyproof_probe(m, {a, b}, grid);
        std::printf("coalition {%s, %s}: %s (%lld misreports)\n",
                    m.buyers()[a].c_str(), m.buyers()[b].c_str(),
                    rep2.pass ? "pass" : "fail", rep2.misreports_tested);
        ok = ok && rep2.pass;
      }
    }
  } else {
    throw ce::ValidationError("unknown check suite: " + suite);
  }
  return ok ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"competitive-equilibrium solver for unit-demand markets"};
  app.require_subcommand(1);

  std::string market_path, eq_path, eq_path_b, trace_path, side = "lowest";
  std::string lattice_op, suite;
  double t_param = 0.0, v_param = 11.0, step = 1e-3;
  long max_steps = 200000;

  CLI::App* solve = app.add_subcommand("solve", "lowest or highest equilibrium");
  solve->add_option("--side", side, "lowest|highest")
      ->check(CLI::IsMember({"lowest", "highest"}));
  solve->add_option("file", market_path, "market file")->required();

  CLI::App* verify = app.add_subcommand("verify", "check an equilibrium file");
  verify->add_option("file", market_path)->required();
  verify->add_option("equilibrium", eq_path)->required();

  CLI::App* lattice = app.add_subcommand("lattice", "meet or join");
  lattice->add_option("op", lattice_op, "meet|join")
      ->required()
      ->check(CLI::IsMember({"meet", "join"}));
  lattice->add_option("file", market_path)->required();
  lattice->add_option("eqA", eq_path)->required();
  lattice->add_option("eqB", eq_path_b)->required();

  CLI::App* continuum = app.add_subcommand("continuum", "interpolated equilibrium");
  continuum->add_option("--t", t_param, "position in [0,1]")->required();
  continuum->add_option("file", market_path)->required();

  CLI::App* auction = app.add_subcommand("auction", "ascending price auction");
  auction->add_option("--step", step, "price increment");
  auction->add_option("--max-steps", max_steps, "step budget");
  auction->add_option("--trace", trace_path, "trace csv path");
  auction->add_option("file", market_path)->required();

  CLI::App* example1 = app.add_subcommand(
      "example1", "the non-terminating oscillating market");
  example1->add_option("--V", v_param, "amplitude (>= 2)");
  example1->add_option("--step", step, "price increment");
  example1->add_option("--max-steps", max_steps, "step budget");
  example1->add_option("--trace", trace_path, "trace csv path");

  CLI::App* adauction = app.add_subcommand("adauction", "personalized-price slot auction");
  adauction->add_option("file", market_path)->required();

  CLI::App* reduce = app.add_subcommand("reduce-two-sided",
                                        "fold seller curves into a buyer/good market");
  reduce->add_option("file", market_path)->required();

  CLI::App* check = app.add_subcommand("check", "verification suites");
  check->add_option("--suite", suite, "tightness|structure|vcg|strategyproof")
      ->required()
      ->check(CLI::IsMember({"tightness", "structure", "vcg", "strategyproof"}));
  check->add_option("file", market_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (solve->parsed()) {
      ce::MarketDocument doc = load(market_path);
      ce::Equilibrium eq = side == "lowest" ? ce::solve_lowest(doc.market)
                                            : ce::solve_highest(doc.market);
      std::fputs(ce::equilibrium_to_json(eq, side).c_str(), stdout);
    } else if (verify->parsed()) {
      return run_verify(market_path, eq_path);
    } else if (lattice->parsed()) {
      ce::MarketDocument doc = load(market_path);
      ce::Equilibrium a =
          ce::equilibrium_from_json(read_file(eq_path), doc.market);
      ce::Equilibrium b =
          ce::equilibrium_from_json(read_file(eq_path_b), doc.market);
      ce::Equilibrium out =
          lattice_op == "meet" ? ce::meet(a, b) : ce::join(a, b);
      std::fputs(ce::equilibrium_to_json(out, lattice_op).c_str(), stdout);
    } else if (continuum->parsed()) {
      ce::MarketDocument doc = load(market_path);
      ce::Equilibrium eq = ce::interpolate_continuum(doc.market, t_param);
      std::fputs(ce::equilibrium_to_json(eq, "continuum").c_str(), stdout);
    } else if (auction->parsed()) {
      ce::MarketDocument doc = load(market_path);
      ce::AuctionTrace trace = ce::run_auction(doc.market, step, max_steps);
      if (!trace_path.empty()) write_trace_file(trace, trace_path);
      print_auction_summary(trace);
    } else if (example1->parsed()) {
      ce::Market m = ce::example1_market(v_param);
      ce::AuctionTrace trace = ce::run_auction(m, step, max_steps);
      if (!trace_path.empty()) write_trace_file(trace, trace_path);
      print_auction_summary(trace);
    } else if (adauction->parsed()) {
      ce::MarketDocument doc = load(market_path);
      if (!doc.ad_auction)
        throw ce::ValidationError("market file has no ad_auction block");
      ce::AdAuctionOutcome out = ce::run_ad_auction(*doc.ad_auction);
      ce::WelfareReport rep = ce::welfare_report(*doc.ad_auction, out);
      std::fputs(ce::ad_outcome_to_json(*doc.ad_auction, out, rep).c_str(),
                 stdout);
    } else if (reduce->parsed()) {
      ce::MarketDocument doc = load(market_path);
      if (!doc.two_sided)
        throw ce::ValidationError("market file has no two_sided block");
      ce::MarketDocument reduced;
      reduced.market = ce::reduce_two_sided(*doc.two_sided);
      std::fputs(ce::serialize_market_document(reduced).c_str(), stdout);
    } else if (check->parsed()) {
      return run_check(suite, market_path);
    }
  } catch (const ce::SizeLimit& e) {
    std::fprintf(stderr, "size limit: %s\n", e.what());
    return kExitSizeLimit;
  } catch (const ce::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitValidation;
  } catch (const ce::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const ce::DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kExitValidation;
  } catch (const ce::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerification;
  }
  return 0;
}
