#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include <sys/wait.h>

#include "feed_check.hpp"
#include "fixtures.hpp"
#include "linkaudit/archive_sim.hpp"
#include "linkaudit/commands.hpp"
#include "linkaudit/records_io.hpp"
#include "linkaudit/text.hpp"
#include "temp_dir.hpp"

using namespace linkaudit;
using namespace linkaudit::testing;
using namespace std::chrono_literals;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const auto command = std::string(LINKAUDIT_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(command.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

void write_corpus(const TempDir& dir) {
  std::filesystem::create_directories(dir / "corpus");
  dir.write("corpus/p1.html",
            "<p>See <a href=\"http://a.org/x\">x</a>, <a href=HTTP://A.ORG:80/x#top>again</a> and "
            "<a href=\"http://localhost/\">local</a>.</p>");
  dir.write("corpus/p2.txt", "Data at http://b.org/data. Also www.c.org/page, and http://nowhere.invalidtld/.");
  dir.write("corpus/manifest.jsonl",
            "{\"paper_id\": \"p1\", \"publication_date\": \"2010-01-01\", \"subjects\": [\"cs.DL\"]}\n"
            "{\"paper_id\": \"p2\", \"publication_date\": \"2009-06\", \"subjects\": [\"math\"]}\n");
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    TempDir dir;
    const auto help = cli(dir, "--help");
    CHECK(help.code == 0);
    for (const char* sub : {"extract", "audit", "report", "seeds", "sim"}) CHECK(help.out.find(sub) != std::string::npos);
    CHECK(cli(dir, "audit --help").out.find("15000") != std::string::npos);
    CHECK(cli(dir, "").code == kExitUsage);
    CHECK(cli(dir, "report --bogus").code == kExitUsage);
    CHECK(cli(dir, "report --outcomes " + (dir / "missing.jsonl").string()).code == kExitUsage);
  }

  TEST_CASE("extract, audit, report and seeds") {
    TempDir dir;
    write_corpus(dir);
    const auto records = dir / "records.jsonl";
    const auto extract = cli(dir, "extract --corpus " + (dir / "corpus").string() + " --out " + records.string());
    REQUIRE_MESSAGE(extract.code == 0, extract.err);
    CHECK(extract.out.find("papers: 2\n") != std::string::npos);
    CHECK(extract.out.find("distinct urls: 3\n") != std::string::npos);
    CHECK(extract.out.find("records: 3\n") != std::string::npos);
    const auto recs = read_citations(records);
    REQUIRE(recs.size() == 3);

    Scenario s;
    s.resources.push_back({.url = "http://a.org/x", .snapshots = {at("2009-12-20T00:00:00Z")}});
    s.resources.push_back({.url = "http://b.org/data", .live_status = 404});
    s.resources.push_back({.url = "http://www.c.org/page", .live_status = 410, .snapshots = {at("2012-01-01T00:00:00Z")}});
    SimServer server(s);

    const auto outcomes = dir / "outcomes.jsonl";
    const auto audit = cli(dir, "audit --records " + records.string() + " --out " + outcomes.string() + " --proxy " +
                                    server.address() + " --timemap-template " + server.base_url() +
                                    "/timemap/link/{url} --timeout-ms 2000 --backoff-ms 10");
    REQUIRE_MESSAGE(audit.code == 0, audit.err);
    CHECK(audit.out.find("outcomes: 3\n") != std::string::npos);
    const auto got = read_outcomes(outcomes).outcomes;
    CHECK(recount(got) == Counts{1, 0, 1, 1});

    const auto csv = cli(dir, "report --outcomes " + outcomes.string() + " --group-by subject");
    REQUIRE_MESSAGE(csv.code == 0, csv.err);
    CHECK(csv.out.find("overall,,total,3\n") != std::string::npos);
    CHECK(csv.out.find("math") != std::string::npos);
    CHECK(cli(dir, "report --outcomes " + outcomes.string() + " --format xml").code == kExitUsage);

    const auto feed = cli(dir, "seeds --records " + records.string());
    REQUIRE(feed.code == 0);
    const auto parsed = parse_feed(feed.out);
    CHECK(parsed.well_formed);
    CHECK(parsed.links == paper_url_pairs(recs));
    CHECK(feed.out == cli(dir, "seeds --records " + records.string()).out);
    CHECK(cli(dir, "seeds --records " + records.string() + " --format plain").out ==
          "http://a.org/x\nhttp://b.org/data\nhttp://www.c.org/page\n");

    dir.write("linkaudit.ini", "[report]\nformat=json\n");
    const auto json = cli(dir, "--config " + (dir / "linkaudit.ini").string() + " report --outcomes " + outcomes.string());
    CHECK(json.code == 0);
    CHECK(json.out.find("\"overall\"") != std::string::npos);
  }

  TEST_CASE("empty inputs") {
    TempDir dir;
    const auto empty = dir.write("empty.jsonl", "");
    const auto report = cli(dir, "report --outcomes " + empty.string());
    CHECK(report.code == kExitEmpty);
    CHECK(report.err.find("error:") != std::string::npos);
    const auto feed = cli(dir, "seeds --records " + empty.string());
    CHECK(feed.code == 0);
    CHECK(parse_feed(feed.out).well_formed);
    CHECK(parse_feed(feed.out).entries == 0);
  }

  TEST_CASE("sim") {
    TempDir dir;
    const auto bad = dir.write("bad.jsonl", "{\"url\": \"http://a.org/\"}\n{\"url\": \"http://a.org/\"}\n");
    const auto run = cli(dir, "sim --scenario " + bad.string() + " --bind 127.0.0.1:0");
    CHECK(run.code == kExitUsage);
    CHECK(run.err.find("duplicate") != std::string::npos);

    const auto good = dir.write("good.jsonl", "{\"url\": \"http://a.org/\"}\n");
    std::atomic<bool> stop{false};
    std::ostringstream out, err;
    int code = -1;
    std::thread t([&] { code = cmd_sim({good, "127.0.0.1:0"}, stop, out, err); });
    std::this_thread::sleep_for(300ms);
    stop = true;
    t.join();
    CHECK(code == kExitOk);
    CHECK(out.str().find("archive_sim serving 1 resources on http://127.0.0.1:") != std::string::npos);
  }
}
