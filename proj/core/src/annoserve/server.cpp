#include "lart/annoserve/server.hpp"

#include "lart/error.hpp"
#include "lart/imaging/png_io.hpp"
#include "lart/io/formats.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that collides with Eigen
// parameter names.
#include "httplib.h"

namespace lart::annoserve {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

json parse_body(const httplib::Request& req, bool allow_empty) {
  if (req.body.empty()) {
    if (allow_empty) return json::object();
    throw BadRequest("request body is empty");
  }
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw BadRequest("request body must be a JSON object");
    return j;
  } catch (const json::parse_error&) {
    throw BadRequest("request body is not valid JSON");
  }
}

std::optional<std::int64_t> optional_revision(const json& body) {
  if (!body.contains("base_revision")) return std::nullopt;
  if (!body.at("base_revision").is_number_integer()) throw BadRequest("\"base_revision\" must be an integer");
  return body.at("base_revision").get<std::int64_t>();
}

/// Runs a handler and maps store exceptions onto HTTP statuses.
template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const NotFound& e) {
    send_error(res, 404, e.what());
  } catch (const Conflict& e) {
    send_error(res, 409, e.what());
  } catch (const BadRequest& e) {
    send_error(res, 400, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

json region_list(const Store& store, const std::string& id, char side) {
  try {
    return io::region_map_to_json(store.regions(id, side));
  } catch (const NotFound&) {
    return nullptr;
  }
}

}  // namespace

Server::Server(Store& store, std::string cors_origin)
    : store_(store), cors_origin_(std::move(cors_origin)), http_(std::make_unique<httplib::Server>()) {
  auto& http = *http_;
  http.set_default_headers({{"Access-Control-Allow-Origin", cors_origin_},
                            {"Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.Get("/pairs", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      json list = json::array();
      for (const auto& p : store_.list()) {
        list.push_back({{"id", p.id}, {"status", std::string(to_string(p.status))}, {"revision", p.revision}});
      }
      send_json(res, 200, {{"pairs", list}});
    });
  });

  http.Get(R"(/pairs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      json body = to_json(store_.get(id));
      const std::string base = "/pairs/" + id + "/image/";
      json images = {{"a", base + "a"}, {"b", base + "b"}};
      const auto& rec = store_.record(id);
      if (rec.colored_a) images["colored_a"] = base + "colored_a";
      if (rec.colored_b) images["colored_b"] = base + "colored_b";
      if (rec.regions_a) images["regions_a"] = base + "regions_a";
      if (rec.regions_b) images["regions_b"] = base + "regions_b";
      body["images"] = images;
      body["regions"] = {{"a", region_list(store_, id, 'a')}, {"b", region_list(store_, id, 'b')}};
      send_json(res, 200, body);
    });
  });

  http.Get(R"(/pairs/([^/]+)/image/([a-z_]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& rec = store_.record(req.matches[1]);
      const std::string which = req.matches[2];
      std::optional<std::filesystem::path> path;
      if (which == "a") path = rec.img_a;
      else if (which == "b") path = rec.img_b;
      else if (which == "colored_a") path = rec.colored_a;
      else if (which == "colored_b") path = rec.colored_b;
      else if (which == "regions_a") path = rec.regions_a;
      else if (which == "regions_b") path = rec.regions_b;
      if (!path) throw NotFound("no image \"" + which + "\" for this pair");
      const auto bytes = imaging::read_file_bytes(*path);
      res.status = 200;
      res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
    });
  });

  http.Put(R"(/pairs/([^/]+)/corr)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      store_.record(id);  // unknown pair ids are 404 before body checks
      const json body = parse_body(req, false);
      const auto base = optional_revision(body);
      if (!base) throw BadRequest("missing \"base_revision\"");
      if (!body.contains("corr")) throw BadRequest("missing \"corr\"");
      CorrSet corr;
      try {
        corr = io::corr_from_json(body.at("corr"));
      } catch (const DataError& e) {
        throw BadRequest(e.what());
      }
      std::vector<RegionEdit> edits;
      if (body.contains("region_edits")) {
        json wrapper = {{"pair_id", id}, {"revision", 0}, {"status", "auto"}, {"region_edits", body.at("region_edits")}};
        edits = doc_from_json(wrapper).region_edits;
      }
      send_json(res, 200, to_json(store_.put_corr(id, *base, corr, edits)));
    });
  });

  http.Post(R"(/pairs/([^/]+)/approve)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      store_.record(id);
      send_json(res, 200, to_json(store_.approve(id, optional_revision(parse_body(req, true)))));
    });
  });

  http.Post(R"(/pairs/([^/]+)/reopen)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      store_.record(id);
      send_json(res, 200, to_json(store_.reopen(id, optional_revision(parse_body(req, true)))));
    });
  });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = http_->bind_to_any_port(host);
    if (bound <= 0) throw std::runtime_error("could not bind to " + host);
    return bound;
  }
  if (!http_->bind_to_port(host, port)) throw std::runtime_error("could not bind to " + host + ":" + std::to_string(port));
  return port;
}

void Server::run() { http_->listen_after_bind(); }

void Server::stop() {
  if (http_) http_->stop();
}

bool Server::running() const { return http_->is_running(); }

}  // namespace lart::annoserve
