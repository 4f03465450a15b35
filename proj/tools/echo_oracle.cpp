// A model-free oracle for protocol tests: every candidate scores its length
// in bytes, reported as a loss.
//
//   morpheus-echo-oracle --stdio
//   morpheus-echo-oracle --http --port 8089

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "morpheus/oracle.hpp"

namespace {

std::string answer(const std::string& body, int& status) {
  using morpheus::json;
  try {
    const auto req = morpheus::request_from_json(json::parse(body));
    morpheus::OracleResponse resp;
    resp.lower_is_worse = false;
    for (const auto& c : req.candidates) resp.scores.push_back(static_cast<double>(c.size()));
    status = 200;
    return morpheus::to_json(resp).dump();
  } catch (const std::exception& e) {
    status = 400;
    return json{{"error", e.what()}}.dump();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echo oracle"};
  bool http = false;
  bool stdio = false;
  std::string host = "127.0.0.1";
  int port = 8089;
  app.add_flag("--http", http, "serve POST /score");
  app.add_flag("--stdio", stdio, "read one request per line on stdin");
  app.add_option("--host", host);
  app.add_option("--port", port);
  CLI11_PARSE(app, argc, argv);

  if (http == stdio) {
    std::cerr << "pass exactly one of --http, --stdio\n";
    return 1;
  }
  if (stdio) {
    std::string line;
    while (std::getline(std::cin, line)) {
      int status = 0;
      std::cout << answer(line, status) << std::endl;
    }
    return 0;
  }
  httplib::Server server;
  server.Post("/score", [](const httplib::Request& req, httplib::Response& res) {
    int status = 0;
    res.set_content(answer(req.body, status), "application/json");
    res.status = status;
  });
  std::cerr << "listening on " << host << ":" << port << '\n';
  return server.listen(host, port) ? 0 : 1;
}
