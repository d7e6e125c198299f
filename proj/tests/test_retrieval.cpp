#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "motif/chunking.h"
#include "motif/errors.h"
#include "motif/retrieval.h"
#include "oracles.h"
#include "support.h"

using namespace motif;

namespace {

using Keys = std::vector<std::optional<std::string>>;

EmbeddedCorpus corpus_of(const oracle::Rows& rows, Keys keys) {
  EmbeddedCorpus c;
  c.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) c.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    c.item_ids.push_back("i" + std::to_string(i));
  }
  c.keys = std::move(keys);
  return c;
}

struct Fixture {
  oracle::Rows rows;
  Keys keys;
};

// Small corpora with integer coordinates so distance ties occur regularly.
Fixture random_fixture(Rng& rng) {
  Fixture f;
  const int n = uniform_int(rng, 3, 20);
  const int d = uniform_int(rng, 1, 4);
  for (int i = 0; i < n; ++i) {
    std::vector<double> r;
    for (int j = 0; j < d; ++j) r.push_back(static_cast<double>(uniform_int(rng, -3, 3)));
    f.rows.push_back(r);
    const int k = uniform_int(rng, 0, 4);
    f.keys.push_back(k == 0 ? std::nullopt : std::optional<std::string>("k" + std::to_string(k)));
  }
  f.keys[0] = f.keys[1] = std::string("k1");  // at least one anchor
  return f;
}

}  // namespace

TEST(Retrieval, FourItemExample) {
  const auto c = corpus_of({{0.0}, {0.1}, {-0.2}, {-0.3}}, {"x", "x", "y", "z"});
  const auto r = retrieval_pr(c, std::vector<int>{1, 2, 3});
  EXPECT_EQ(r.n_anchors, 2);
  EXPECT_DOUBLE_EQ(r.mean_precision[0], 1.0);
  EXPECT_DOUBLE_EQ(r.mean_recall[0], 1.0);
  EXPECT_DOUBLE_EQ(r.mean_precision[1], 0.5);
  EXPECT_DOUBLE_EQ(r.mean_recall[1], 1.0);
  EXPECT_DOUBLE_EQ(r.mean_precision[2], 1.0 / 3.0);
  // Horizontal run to recall 0 at precision 1, then flat recall: area 1.
  EXPECT_DOUBLE_EQ(r.auc_pr, 1.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(Retrieval, AllRelevantGivesPrecisionOne) {
  const auto c = corpus_of({{0.0, 1.0}, {2.0, 0.5}, {1.0, 1.0}, {3.0, 3.0}, {-1.0, 0.0}}, Keys(5, std::string("m")));
  const auto r = retrieval_pr(c);
  ASSERT_EQ(r.k_values, (std::vector<int>{1, 2, 3, 4}));
  for (double p : r.mean_precision) EXPECT_DOUBLE_EQ(p, 1.0);
  EXPECT_DOUBLE_EQ(r.mean_recall.back(), 1.0);
}

TEST(Retrieval, IdenticalEmbeddingsAreFlaggedDegenerate) {
  const auto c = corpus_of({{1.0}, {1.0}, {1.0}, {1.0}}, {"a", "b", "a", "b"});
  const auto r = retrieval_pr(c, std::vector<int>{1, 2, 3});
  EXPECT_TRUE(r.degenerate);
  // Tie-break by index: item 0 ranks 1, 2, 3; item 1 ranks 0, 2, 3; item 2 ranks 0, 1, 3; item 3 ranks 0, 1, 2.
  // Only item 2 finds a relevant item first; at K = 2 items 0, 2 and 3 have found theirs.
  EXPECT_DOUBLE_EQ(r.mean_precision[0], 0.25);
  EXPECT_DOUBLE_EQ(r.mean_recall[1], 0.75);
}

TEST(Retrieval, NoAnchorsIsAnError) {
  EXPECT_THROW(retrieval_pr(corpus_of({{0.0}, {1.0}}, {"a", "b"})), EvaluationError);
  EXPECT_THROW(retrieval_pr(corpus_of({{0.0}, {1.0}}, {std::nullopt, std::nullopt})), EvaluationError);
}

TEST(Retrieval, AgreesWithOracleOn200Corpora) {
  Rng rng = derive_stream(21, "retrieval-oracle");
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_fixture(rng);
    const auto r = retrieval_pr(corpus_of(f.rows, f.keys));
    const auto o = oracle::retrieval(f.rows, f.keys, r.k_values);
    ASSERT_EQ(r.n_anchors, o.anchors);
    for (size_t t = 0; t < r.k_values.size(); ++t) {
      EXPECT_NEAR(r.mean_precision[t], o.precision[t], 1e-15) << "trial " << trial;
      EXPECT_NEAR(r.mean_recall[t], o.recall[t], 1e-15) << "trial " << trial;
    }
    EXPECT_NEAR(r.auc_pr, oracle::auc(o.recall, o.precision), 1e-14);
  }
}

TEST(Retrieval, MonotoneRecallAndIntegerCounts) {
  Rng rng = derive_stream(22, "retrieval-props");
  for (int trial = 0; trial < 200; ++trial) {
    auto f = random_fixture(rng);
    for (auto& row : f.rows) {
      for (auto& v : row) v += 0.01 * standard_normal(rng);
    }
    const auto r = retrieval_pr(corpus_of(f.rows, f.keys));
    ASSERT_EQ(r.mean_precision.size(), r.k_values.size());
    ASSERT_EQ(r.mean_recall.size(), r.k_values.size());
    for (size_t t = 0; t < r.k_values.size(); ++t) {
      if (t > 0) EXPECT_GE(r.mean_recall[t], r.mean_recall[t - 1]);
      const double hits = r.mean_precision[t] * r.k_values[t] * r.n_anchors;
      EXPECT_NEAR(hits, std::round(hits), 1e-9);
      EXPECT_GE(r.mean_precision[t], 0.0);
      EXPECT_LE(r.mean_precision[t], 1.0);
    }
    EXPECT_GE(r.auc_pr, 0.0);
    EXPECT_LE(r.auc_pr, 1.0);
  }
}

TEST(Retrieval, AucIsIsometryInvariant) {
  Rng rng = derive_stream(23, "isometry");
  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 4, 20);
    const int d = uniform_int(rng, 2, 5);
    EmbeddedCorpus c;
    c.vectors.resize(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) c.vectors(i, j) = standard_normal(rng);
      c.keys.push_back("k" + std::to_string(i % 3));
      c.item_ids.push_back(std::to_string(i));
    }
    Mat g(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) g(i, j) = standard_normal(rng);
    }
    const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
    Eigen::RowVectorXd shift(d);
    for (int j = 0; j < d; ++j) shift(j) = 10.0 * standard_normal(rng);
    EmbeddedCorpus moved = c;
    moved.vectors = (c.vectors * q).rowwise() + shift;
    EXPECT_NEAR(retrieval_pr(c).auc_pr, retrieval_pr(moved).auc_pr, 1e-12);
  }
}

TEST(Embedding, IbprIsTranspositionInvariant) {
  Rng rng = derive_stream(24, "ibpr");
  for (int i = 0; i < 50; ++i) {
    const auto c = motif::testing::random_chunk(rng, 16, 6, 40, 80, "s", i);
    auto up = c;
    for (auto& n : up.notes) n.pitch += 7;
    const auto e = embed_corpus_ibpr({c, up}, {std::nullopt, std::nullopt});
    ASSERT_EQ(e.vectors.cols(), 128 * 16);
    EXPECT_TRUE(e.vectors.row(0) == e.vectors.row(1));
  }
}

TEST(Embedding, ModelAndRandomModes) {
  EncoderConfig enc;
  enc.n_layers = 1;
  enc.model_dim = 8;
  enc.n_heads = 2;
  enc.ffn_dim = 16;
  enc.embed_dim = 4;
  ExpanderConfig exp;
  exp.hidden_dims = {8};
  exp.out_dim = 8;
  const Model m(enc, exp, 3);
  Rng rng = derive_stream(25, "modes");
  const auto c = motif::testing::random_chunk(rng);
  const std::vector<PianoRollChunk> chunks{c, c, motif::testing::random_chunk(rng)};
  const auto e = embed_corpus(chunks, m, keys_by_origin(chunks));
  EXPECT_EQ(e.size(), 3u);
  EXPECT_TRUE(e.vectors.row(0) == e.vectors.row(1));
  const auto r1 = embed_corpus_random(chunks, 32, 7, keys_by_origin(chunks));
  const auto r2 = embed_corpus_random(chunks, 32, 7, keys_by_origin(chunks));
  EXPECT_EQ(r1.vectors.cols(), 32);
  EXPECT_TRUE(r1.vectors == r2.vectors);
}

TEST(Embedding, LabelKeys) {
  std::vector<PianoRollChunk> chunks(3);
  for (int i = 0; i < 3; ++i) {
    chunks[static_cast<size_t>(i)].song_id = "s";
    chunks[static_cast<size_t>(i)].bar_index = i;
  }
  const auto keys = keys_by_label(chunks, {{"s", 0, 4}, {"s", 2, 4}});
  EXPECT_TRUE(keys[0] && keys[2] && *keys[0] == *keys[2]);
  EXPECT_FALSE(keys[1]);
}

TEST(Report, JsonRoundTripAndCsv) {
  const auto c = corpus_of({{0.0}, {0.1}, {-0.2}, {-0.3}}, {"x", "x", "y", "y"});
  const auto r = retrieval_pr(c);
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
  const auto dir = motif::testing::temp_dir("curve");
  write_curve_csv(dir / "c.csv", r);
  std::ifstream in(dir / "c.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "K,mean_precision,mean_recall");
}
