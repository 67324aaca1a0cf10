#include "ce/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ce {

namespace {

using json = nlohmann::ordered_json;

std::string fmt9(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.9f", x + 0.0);
  return b;
}

json map_to_json(const PriceMap& map) {
  json out;
  if (map.is_identity()) {
    out["type"] = "identity";
  } else if (map.is_scale()) {
    out["type"] = "scale";
    out["divisor"] = map.scale_divisor();
  } else {
    out["type"] = "piecewise_linear_increasing";
    json pts = json::array();
    for (const auto& [x, y] : map.points()) pts.push_back({x, y});
    out["points"] = std::move(pts);
  }
  return out;
}

PriceMap map_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type"))
    throw ValidationError(where + ": price map needs a type tag");
  std::string type = j.at("type").get<std::string>();
  if (type == "identity") return PriceMap::identity();
  if (type == "scale")
    return PriceMap::scale(j.at("divisor").get<double>());
  if (type == "piecewise_linear_increasing") {
    std::vector<PriceMap::Point> pts;
    for (const auto& p : j.at("points"))
      pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return PriceMap::piecewise_linear(std::move(pts));
  }
  throw ValidationError(where + ": unknown price map type \"" + type + "\"");
}

json spec_to_json(const UtilitySpec& spec) {
  json out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UtilitySpec::Quasilinear>) {
          out["type"] = "quasilinear";
          out["v"] = n.value;
        } else if constexpr (std::is_same_v<T, UtilitySpec::PiecewiseLinear>) {
          out["type"] = "piecewise_linear";
          json pts = json::array();
          for (const auto& [p, u] : n.points) pts.push_back({p, u});
          out["points"] = std::move(pts);
        } else if constexpr (std::is_same_v<T, UtilitySpec::Budgeted>) {
          out["type"] = "budgeted";
          out["v"] = n.value;
          out["b"] = n.budget;
          out["K"] = n.steep_slope;
        } else if constexpr (std::is_same_v<T, UtilitySpec::Oscillatory>) {
          out["type"] = "oscillatory";
          out["V"] = n.amplitude;
          out["variant"] = n.cos_variant ? "cos" : "sin";
        } else if constexpr (std::is_same_v<T, UtilitySpec::Shifted>) {
          out["type"] = "shifted";
          out["inner"] = spec_to_json(*n.inner);
          out["price_shift"] = n.price_shift;
          out["payoff_shift"] = n.payoff_shift;
        } else {
          out["type"] = "price_mapped";
          out["inner"] = spec_to_json(*n.inner);
          out["map"] = map_to_json(n.map);
        }
      },
      spec.node());
  return out;
}

UtilitySpec spec_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type"))
    throw ValidationError(where + ": utility spec needs a type tag");
  std::string type = j.at("type").get<std::string>();
  if (type == "quasilinear")
    return UtilitySpec::quasilinear(j.at("v").get<double>());
  if (type == "piecewise_linear") {
    std::vector<UtilitySpec::Point> pts;
    for (const auto& p : j.at("points"))
      pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return UtilitySpec::piecewise_linear(std::move(pts));
  }
  if (type == "budgeted") {
    double k = j.contains("K") ? j.at("K").get<double>() : 1e9;
    return UtilitySpec::budgeted(j.at("v").get<double>(),
                                 j.at("b").get<double>(), k);
  }
  if (type == "oscillatory") {
    std::string variant = j.at("variant").get<std::string>();
    if (variant != "sin" && variant != "cos")
      throw ValidationError(where + ": oscillatory variant must be sin|cos");
    return UtilitySpec::oscillatory(j.at("V").get<double>(), variant == "cos");
  }
  if (type == "shifted")
    return UtilitySpec::shifted(spec_from_json(j.at("inner"), where),
                                j.at("price_shift").get<double>(),
                                j.at("payoff_shift").get<double>());
  if (type == "price_mapped")
    return UtilitySpec::price_mapped(spec_from_json(j.at("inner"), where),
                                     map_from_json(j.at("map"), where));
  throw ValidationError(where + ": unknown utility spec type \"" + type +
                        "\"");
}

std::string cell(const char* field, int i, int j) {
  std::ostringstream os;
  os << field << "[" << i << "][" << j << "]";
  return os.str();
}

}  // namespace

MarketDocument parse_market_document(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("market file: ") + e.what());
  }
  try {
    MarketDocument out;
    out.schema_version = doc.value("schema_version", 1);
    std::vector<std::string> buyers =
        doc.at("buyers").get<std::vector<std::string>>();
    std::vector<std::string> goods =
        doc.at("goods").get<std::vector<std::string>>();
    const json& util = doc.at("utilities");
    if (util.size() != buyers.size())
      throw ValidationError("utilities must have one row per buyer");
    std::vector<UtilitySpec> specs;
    for (size_t i = 0; i < buyers.size(); ++i) {
      if (util[i].size() != goods.size())
        throw ValidationError("utilities row " + std::to_string(i) +
                              " has wrong length");
      for (size_t j = 0; j < goods.size(); ++j)
        specs.push_back(spec_from_json(util[i][j], cell("utilities", i, j)));
    }
    out.market = Market(buyers, goods, std::move(specs));
    ValidationResult ok = out.market.validate();
    if (!ok.ok) throw ValidationError(ok.reason);

    if (doc.contains("price_maps")) {
      const json& maps = doc.at("price_maps");
      if (maps.size() != buyers.size())
        throw ValidationError("price_maps must have one row per buyer");
      for (size_t i = 0; i < buyers.size(); ++i) {
        if (maps[i].size() != goods.size())
          throw ValidationError("price_maps row " + std::to_string(i) +
                                " has wrong length");
        for (size_t j = 0; j < goods.size(); ++j) {
          PriceMap m = map_from_json(maps[i][j], cell("price_maps", i, j));
          ValidationResult mr = m.validate();
          if (!mr.ok)
            throw ValidationError(cell("price_maps", i, j) + ": " + mr.reason);
          out.price_maps.push_back(std::move(m));
        }
      }
    }

    if (doc.contains("ad_auction")) {
      const json& ad = doc.at("ad_auction");
      AdAuctionConfig cfg;
      cfg.slots = goods;
      std::vector<std::string> modes =
          ad.at("modes").get<std::vector<std::string>>();
      if (modes.size() != buyers.size())
        throw ValidationError("ad_auction.modes must have one entry per buyer");
      cfg.engine_ctr =
          ad.at("engine_ctr").get<std::vector<std::vector<double>>>();
      for (size_t i = 0; i < buyers.size(); ++i) {
        AdvertiserSpec a;
        a.id = buyers[i];
        if (modes[i] == "cpc")
          a.mode = AdMode::Cpc;
        else if (modes[i] == "cpm")
          a.mode = AdMode::Cpm;
        else
          throw ValidationError("ad_auction.modes entries must be cpc|cpm");
        for (size_t j = 0; j < goods.size(); ++j)
          a.slot_curves.push_back(out.market.at(i, j));
        if (ad.contains("standard")) {
          const json& st = ad.at("standard");
          for (size_t j = 0; j < goods.size(); ++j) {
            const json& p = st.at(i).at(j);
            if (p.is_null())
              a.standard.emplace_back(std::nullopt);
            else
              a.standard.push_back(StandardParams{p.at("v").get<double>(),
                                                  p.at("c").get<double>()});
          }
        }
        cfg.advertisers.push_back(std::move(a));
      }
      out.ad_auction = std::move(cfg);
    }

    if (doc.contains("two_sided")) {
      const json& ts = doc.at("two_sided");
      TwoSidedMarket t;
      t.side_i = buyers;
      t.side_j = goods;
      for (size_t i = 0; i < buyers.size(); ++i)
        for (size_t j = 0; j < goods.size(); ++j)
          t.buyer_utilities.push_back(out.market.at(i, j));
      const json& sellers = ts.at("seller_utilities");
      if (sellers.size() != buyers.size())
        throw ValidationError("seller_utilities must have one row per buyer");
      for (size_t i = 0; i < buyers.size(); ++i) {
        if (sellers[i].size() != goods.size())
          throw ValidationError("seller_utilities row " + std::to_string(i) +
                                " has wrong length");
        for (size_t j = 0; j < goods.size(); ++j) {
          UtilitySpec s = spec_from_json(sellers[i][j],
                                         cell("seller_utilities", i, j));
          ValidationResult r = s.validate();
          if (!r.ok)
            throw ValidationError(cell("seller_utilities", i, j) + ": " +
                                  r.reason);
          t.seller_utilities.push_back(std::move(s));
        }
      }
      out.two_sided = std::move(t);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("market file: ") + e.what());
  }
}

MarketDocument load_market_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_market_document(buf.str());
}

std::string serialize_market_document(const MarketDocument& doc) {
  const Market& m = doc.market;
  json out;
  out["schema_version"] = doc.schema_version;
  out["buyers"] = m.buyers();
  out["goods"] = m.goods();
  json rows = json::array();
  for (int i = 0; i < m.num_buyers(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.num_goods(); ++j) row.push_back(spec_to_json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  out["utilities"] = std::move(rows);
  if (!doc.price_maps.empty()) {
    json maps = json::array();
    for (int i = 0; i < m.num_buyers(); ++i) {
      json row = json::array();
      for (int j = 0; j < m.num_goods(); ++j)
        row.push_back(
            map_to_json(doc.price_maps[static_cast<size_t>(i) * m.num_goods() + j]));
      maps.push_back(std::move(row));
    }
    out["price_maps"] = std::move(maps);
  }
  if (doc.ad_auction) {
    json ad;
    json modes = json::array();
    for (const auto& a : doc.ad_auction->advertisers)
      modes.push_back(a.mode == AdMode::Cpc ? "cpc" : "cpm");
    ad["modes"] = std::move(modes);
    ad["engine_ctr"] = doc.ad_auction->engine_ctr;
    bool any_standard = false;
    for (const auto& a : doc.ad_auction->advertisers)
      any_standard = any_standard || !a.standard.empty();
    if (any_standard) {
      json st = json::array();
      for (const auto& a : doc.ad_auction->advertisers) {
        json row = json::array();
        for (int j = 0; j < m.num_goods(); ++j) {
          if (a.standard.empty() || !a.standard[j]) {
            row.push_back(nullptr);
          } else {
            json p;
            p["v"] = a.standard[j]->value;
            p["c"] = a.standard[j]->ctr;
            row.push_back(std::move(p));
          }
        }
        st.push_back(std::move(row));
      }
      ad["standard"] = std::move(st);
    }
    out["ad_auction"] = std::move(ad);
  }
  if (doc.two_sided) {
    json sellers = json::array();
    for (int i = 0; i < m.num_buyers(); ++i) {
      json row = json::array();
      for (int j = 0; j < m.num_goods(); ++j)
        row.push_back(spec_to_json(doc.two_sided->seller_at(i, j)));
      sellers.push_back(std::move(row));
    }
    json ts;
    ts["seller_utilities"] = std::move(sellers);
    out["two_sided"] = std::move(ts);
  }
  return out.dump(2) + "\n";
}

std::string equilibrium_to_json(const Equilibrium& eq,
                                const std::string& side) {
  const Market& m = *eq.market;
  std::string out = "{\n  \"side\": " + json(side).dump() + ",\n";
  out += "  \"prices\": [";
  for (int j = 0; j < m.num_goods(); ++j)
    out += (j ? ", " : "") + fmt9(eq.prices[j]);
  out += "],\n  \"payoffs\": [";
  for (int i = 0; i < m.num_buyers(); ++i)
    out += (i ? ", " : "") + fmt9(eq.payoffs[i]);
  out += "],\n  \"matching\": {";
  for (int i = 0; i < m.num_buyers(); ++i) {
    out += (i ? ", " : "") + json(m.buyers()[i]).dump() + ": ";
    int j = eq.matching.good_of(i);
    out += j < 0 ? "null" : json(m.goods()[j]).dump();
  }
  out += "}\n}\n";
  return out;
}

Equilibrium equilibrium_from_json(const std::string& json_text,
                                  const Market& market) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("equilibrium file: ") + e.what());
  }
  try {
    Equilibrium eq;
    eq.market = &market;
    eq.prices = doc.at("prices").get<std::vector<double>>();
    eq.payoffs = doc.at("payoffs").get<std::vector<double>>();
    if (static_cast<int>(eq.prices.size()) != market.num_goods() ||
        static_cast<int>(eq.payoffs.size()) != market.num_buyers())
      throw ValidationError("equilibrium vectors do not match the market");
    eq.matching = Matching(market.num_buyers());
    const json& mu = doc.at("matching");
    for (int i = 0; i < market.num_buyers(); ++i) {
      const json& v = mu.at(market.buyers()[i]);
      if (v.is_null()) continue;
      std::string gid = v.get<std::string>();
      auto it = std::find(market.goods().begin(), market.goods().end(), gid);
      if (it == market.goods().end())
        throw ValidationError("matching references unknown good " + gid);
      eq.matching.buyer_to_good[i] =
          static_cast<int>(it - market.goods().begin());
    }
    eq.matching.good_to_buyer(market.num_goods());
    return eq;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("equilibrium file: ") + e.what());
  }
}

std::string ad_outcome_to_json(const AdAuctionConfig& config,
                               const AdAuctionOutcome& outcome,
                               const WelfareReport& report) {
  std::string out = "{\n  \"base_prices\": {";
  for (size_t j = 0; j < config.slots.size(); ++j)
    out += (j ? ", " : "") + json(config.slots[j]).dump() + ": " +
           fmt9(outcome.base_prices[j]);
  out += "},\n  \"assignments\": [\n";
  for (size_t r = 0; r < outcome.rows.size(); ++r) {
    const AdAssignmentRow& row = outcome.rows[r];
    out += "    {\"advertiser\": " +
           json(config.advertisers[row.advertiser].id).dump() +
           ", \"slot\": " + json(config.slots[row.slot]).dump() +
           ", \"base_price\": " + fmt9(row.base_price) +
           ", \"observed_price\": " + fmt9(row.observed_price) +
           ", \"unit\": " +
           (row.unit == PriceUnit::PerClick ? "\"per_click\""
                                            : "\"per_impression\"") +
           "}";
    out += r + 1 < outcome.rows.size() ? ",\n" : "\n";
  }
  out += "  ],\n  \"engine_revenue\": " + fmt9(report.engine_revenue) +
         ",\n  \"coalition_welfare\": " + fmt9(report.coalition_welfare) +
         ",\n  \"all_standard_agreeing\": " +
         (report.all_standard_agreeing ? "true" : "false");
  if (report.vcg) {
    out += ",\n  \"reference_welfare\": " + fmt9(report.vcg->welfare);
  }
  out += "\n}\n";
  return out;
}

}  // namespace ce
