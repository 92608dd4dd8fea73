#include <secsyn/predictor.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace secsyn
{

namespace
{

constexpr std::array<char const*, num_features> feature_names{ "f1_overall_diversity", "f2_lvt_area_pct", "f3_hvt_area_pct" };

struct tree_builder
{
  std::vector<feature_array> const& x;
  std::vector<double> const& residual;
  gbrt_params const& hp;
  regression_tree tree;

  int32_t build( std::vector<uint32_t>& rows, uint32_t depth )
  {
    auto const id = int32_t( tree.nodes.size() );
    tree.nodes.emplace_back();
    double sum = 0;
    for ( auto r : rows )
      sum += residual[r];
    auto const n = double( rows.size() );
    tree.nodes[id].value = sum / n;
    if ( depth == 0 || rows.size() < 2u * hp.min_leaf )
      return id;

    /* exhaustive search over features and midpoints between distinct values */
    double best_gain = 1e-12 * std::max( 1.0, sum * sum / n );
    int32_t best_feature = -1;
    double best_threshold = 0;
    for ( uint32_t f = 0; f < num_features; ++f )
    {
      std::stable_sort( rows.begin(), rows.end(), [&]( uint32_t a, uint32_t b ) { return x[a][f] < x[b][f]; } );
      double left = 0;
      for ( std::size_t i = 0; i + 1 < rows.size(); ++i )
      {
        left += residual[rows[i]];
        auto const nl = double( i + 1 );
        auto const nr = n - nl;
        if ( x[rows[i]][f] == x[rows[i + 1]][f] || nl < hp.min_leaf || nr < hp.min_leaf )
          continue;
        auto const right = sum - left;
        auto const gain = left * left / nl + right * right / nr - sum * sum / n;
        if ( gain > best_gain )
        {
          best_gain = gain;
          best_feature = int32_t( f );
          best_threshold = 0.5 * ( x[rows[i]][f] + x[rows[i + 1]][f] );
        }
      }
    }
    if ( best_feature < 0 )
      return id;

    std::vector<uint32_t> lo, hi;
    for ( auto r : rows )
      ( x[r][best_feature] <= best_threshold ? lo : hi ).push_back( r );
    auto const l = build( lo, depth - 1u );
    auto const h = build( hi, depth - 1u );
    auto& node = tree.nodes[id];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = h;
    return id;
  }
};

/* appends `count` trees fitted to the residuals of `m` on its corpus */
void boost( surrogate_model& m, gbrt_params const& hp, uint32_t count )
{
  auto const& x = m.corpus_x;
  std::vector<double> residual( x.size() );
  for ( std::size_t i = 0; i < x.size(); ++i )
    residual[i] = m.corpus_y[i] - predict( m, x[i] );
  for ( uint32_t t = 0; t < count; ++t )
  {
    std::vector<uint32_t> rows( x.size() );
    std::iota( rows.begin(), rows.end(), 0u );
    tree_builder b{ x, residual, hp, {} };
    b.build( rows, hp.depth );
    for ( std::size_t i = 0; i < x.size(); ++i )
      residual[i] -= m.learning_rate * b.tree.evaluate( x[i] );
    m.trees.push_back( std::move( b.tree ) );
  }
}

void check_sample( labeled_sample const& s )
{
  for ( auto v : to_array( s.features ) )
  {
    if ( !std::isfinite( v ) )
      throw predictor_error( "non-finite feature value" );
  }
  if ( !s.censored && !( std::isfinite( s.label ) && s.label > 0 ) )
    throw predictor_error( "labels must be positive and finite" );
}

double mean_of( std::vector<double> const& v )
{
  return std::accumulate( v.begin(), v.end(), 0.0 ) / double( v.size() );
}

std::vector<double> average_ranks( std::vector<double> const& v )
{
  std::vector<std::size_t> idx( v.size() );
  std::iota( idx.begin(), idx.end(), std::size_t( 0 ) );
  std::stable_sort( idx.begin(), idx.end(), [&]( std::size_t a, std::size_t b ) { return v[a] < v[b]; } );
  std::vector<double> r( v.size() );
  for ( std::size_t i = 0; i < idx.size(); )
  {
    auto j = i;
    while ( j < idx.size() && v[idx[j]] == v[idx[i]] )
      ++j;
    for ( auto k = i; k < j; ++k )
      r[idx[k]] = 0.5 * double( i + j - 1 );
    i = j;
  }
  return r;
}

nlohmann::ordered_json tree_to_json( regression_tree const& t, int32_t id )
{
  auto const& n = t.nodes[id];
  if ( n.feature < 0 )
    return { { "leaf", n.value } };
  return { { "split", { { "feature", feature_names[n.feature] }, { "threshold", n.threshold } } },
           { "left", tree_to_json( t, n.left ) },
           { "right", tree_to_json( t, n.right ) } };
}

int32_t tree_from_json( regression_tree& t, nlohmann::json const& j )
{
  auto const id = int32_t( t.nodes.size() );
  t.nodes.emplace_back();
  if ( j.contains( "leaf" ) )
  {
    t.nodes[id].value = j.at( "leaf" ).get<double>();
    return id;
  }
  auto const& s = j.at( "split" );
  auto const name = s.at( "feature" ).get<std::string>();
  auto const f = std::find( feature_names.begin(), feature_names.end(), name );
  if ( f == feature_names.end() )
    throw predictor_error( "unknown feature '" + name + "' in model" );
  auto const l = tree_from_json( t, j.at( "left" ) );
  auto const r = tree_from_json( t, j.at( "right" ) );
  auto& n = t.nodes[id];
  n.feature = int32_t( f - feature_names.begin() );
  n.threshold = s.at( "threshold" ).get<double>();
  n.left = l;
  n.right = r;
  return id;
}

} // namespace

void validate_gbrt_params( gbrt_params const& hp )
{
  if ( hp.depth == 0u )
    throw predictor_error( "tree depth must be at least 1" );
  if ( !( hp.learning_rate > 0 && hp.learning_rate <= 1 ) )
    throw predictor_error( "learning rate must be in (0, 1]" );
  if ( hp.min_leaf == 0u )
    throw predictor_error( "min_leaf must be at least 1" );
  if ( !( hp.test_fraction >= 0 && hp.test_fraction < 1 ) )
    throw predictor_error( "test fraction must be in [0, 1)" );
}

double regression_tree::evaluate( feature_array const& x ) const
{
  if ( nodes.empty() )
    return 0.0;
  int32_t id = 0;
  while ( nodes[id].feature >= 0 )
    id = x[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
  return nodes[id].value;
}

double predict( surrogate_model const& m, feature_array const& x )
{
  if ( !m.trained )
    throw predictor_error( "model is not trained" );
  double sum = 0;
  for ( auto const& t : m.trees )
    sum += t.evaluate( x );
  return m.base + m.learning_rate * sum;
}

double predict( surrogate_model const& m, feature_vector const& fv )
{
  return predict( m, to_array( fv ) );
}

training_result train( std::vector<labeled_sample> const& samples, gbrt_params const& hp, uint64_t seed )
{
  validate_gbrt_params( hp );
  std::vector<labeled_sample const*> usable;
  for ( auto const& s : samples )
  {
    check_sample( s );
    if ( !s.censored )
      usable.push_back( &s );
  }
  if ( usable.empty() )
    throw predictor_error( "all samples are censored" );
  if ( usable.size() < 10u )
    throw predictor_error( "insufficient samples: " + std::to_string( usable.size() ) + " non-censored, need at least 10" );

  std::mt19937_64 rng( seed );
  std::shuffle( usable.begin(), usable.end(), rng );
  auto n_test = std::size_t( std::llround( hp.test_fraction * double( usable.size() ) ) );
  n_test = std::min( n_test, usable.size() - 1u );

  training_result r;
  auto& m = r.model;
  m.learning_rate = hp.learning_rate;
  m.seed = seed;
  std::vector<feature_array> test_x;
  std::vector<double> test_y, all_y;
  for ( std::size_t i = 0; i < usable.size(); ++i )
  {
    auto const x = to_array( usable[i]->features );
    all_y.push_back( usable[i]->label );
    if ( i < n_test )
    {
      test_x.push_back( x );
      test_y.push_back( usable[i]->label );
    }
    else
    {
      m.corpus_x.push_back( x );
      m.corpus_y.push_back( usable[i]->label );
    }
  }
  m.base = mean_of( m.corpus_y );
  m.trained = true;
  boost( m, hp, hp.trees );

  auto& mt = r.metrics;
  mt.train_samples = m.corpus_x.size();
  mt.test_samples = test_x.size();
  mt.censored_excluded = samples.size() - usable.size();
  std::vector<double> fit;
  for ( auto const& x : m.corpus_x )
    fit.push_back( predict( m, x ) );
  mt.train_rmse = rmse( fit, m.corpus_y );
  if ( !test_x.empty() )
  {
    std::vector<double> pred;
    for ( auto const& x : test_x )
      pred.push_back( predict( m, x ) );
    mt.test_rmse = rmse( pred, test_y );
    mt.mean_predictor_rmse = rmse( std::vector<double>( test_y.size(), m.base ), test_y );
    mt.test_spearman = spearman( pred, test_y );
  }
  auto const mu = mean_of( all_y );
  double ss = 0;
  for ( auto y : all_y )
    ss += ( y - mu ) * ( y - mu );
  mt.label_std = std::sqrt( ss / double( all_y.size() ) );
  return r;
}

training_result fine_tune( surrogate_model const& m, std::vector<labeled_sample> const& new_samples, gbrt_params const& hp )
{
  if ( !m.trained )
    throw predictor_error( "model is not trained" );
  if ( new_samples.empty() )
    throw predictor_error( "fine_tune needs at least one new sample" );
  validate_gbrt_params( hp );
  for ( auto const& s : new_samples )
    check_sample( s );

  training_result r{ m, {} };
  if ( hp.extra_trees > 0u )
  {
    auto const old = m.corpus_x.size();
    for ( auto const& s : new_samples )
    {
      if ( s.censored )
      {
        ++r.metrics.censored_excluded;
        continue;
      }
      r.model.corpus_x.push_back( to_array( s.features ) );
      r.model.corpus_y.push_back( s.label );
    }
    boost( r.model, hp, hp.extra_trees );
    for ( std::size_t i = 0; i < old; ++i )
      r.metrics.max_shift_on_corpus = std::max( r.metrics.max_shift_on_corpus, std::fabs( predict( r.model, m.corpus_x[i] ) - predict( m, m.corpus_x[i] ) ) );
  }
  std::vector<double> fit;
  for ( auto const& x : r.model.corpus_x )
    fit.push_back( predict( r.model, x ) );
  r.metrics.train_samples = fit.size();
  r.metrics.train_rmse = fit.empty() ? 0.0 : rmse( fit, r.model.corpus_y );
  return r;
}

double rmse( std::vector<double> const& predictions, std::vector<double> const& labels )
{
  if ( predictions.size() != labels.size() )
    throw predictor_error( "rmse: length mismatch" );
  if ( predictions.empty() )
    throw predictor_error( "rmse: empty input" );
  double s = 0;
  for ( std::size_t i = 0; i < labels.size(); ++i )
    s += ( predictions[i] - labels[i] ) * ( predictions[i] - labels[i] );
  return std::sqrt( s / double( labels.size() ) );
}

double spearman( std::vector<double> const& x, std::vector<double> const& y )
{
  if ( x.size() != y.size() )
    throw predictor_error( "spearman: length mismatch" );
  if ( x.size() < 2u )
    return 0.0;
  auto const rx = average_ranks( x ), ry = average_ranks( y );
  auto const mx = mean_of( rx ), my = mean_of( ry );
  double sxy = 0, sxx = 0, syy = 0;
  for ( std::size_t i = 0; i < rx.size(); ++i )
  {
    sxy += ( rx[i] - mx ) * ( ry[i] - my );
    sxx += ( rx[i] - mx ) * ( rx[i] - mx );
    syy += ( ry[i] - my ) * ( ry[i] - my );
  }
  if ( sxx == 0 || syy == 0 )
    return 0.0;
  return sxy / std::sqrt( sxx * syy );
}

std::string model_to_json( surrogate_model const& m )
{
  if ( !m.trained )
    throw predictor_error( "model is not trained" );
  nlohmann::ordered_json doc;
  doc["format"] = "secsyn-model";
  doc["version"] = 1;
  doc["features"] = feature_names;
  doc["seed"] = m.seed;
  doc["base"] = m.base;
  doc["learning_rate"] = m.learning_rate;
  auto& trees = doc["trees"] = nlohmann::ordered_json::array();
  for ( auto const& t : m.trees )
    trees.push_back( t.nodes.empty() ? nlohmann::ordered_json{ { "leaf", 0.0 } } : tree_to_json( t, 0 ) );
  doc["corpus"] = { { "x", m.corpus_x }, { "y", m.corpus_y } };
  return doc.dump( 1 ) + "\n";
}

surrogate_model model_from_json( std::string const& text )
{
  try
  {
    auto const doc = nlohmann::json::parse( text );
    if ( doc.at( "format" ) != "secsyn-model" || doc.at( "version" ) != 1 )
      throw predictor_error( "unsupported model document" );
    surrogate_model m;
    m.seed = doc.at( "seed" ).get<uint64_t>();
    m.base = doc.at( "base" ).get<double>();
    m.learning_rate = doc.at( "learning_rate" ).get<double>();
    for ( auto const& jt : doc.at( "trees" ) )
    {
      regression_tree t;
      tree_from_json( t, jt );
      m.trees.push_back( std::move( t ) );
    }
    m.corpus_x = doc.at( "corpus" ).at( "x" ).get<std::vector<feature_array>>();
    m.corpus_y = doc.at( "corpus" ).at( "y" ).get<std::vector<double>>();
    if ( m.corpus_x.size() != m.corpus_y.size() )
      throw predictor_error( "model corpus is inconsistent" );
    m.trained = true;
    return m;
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw predictor_error( std::string( "malformed model document: " ) + e.what() );
  }
}

std::string metrics_to_json( train_metrics const& m )
{
  nlohmann::ordered_json doc{ { "train_samples", m.train_samples },
                              { "test_samples", m.test_samples },
                              { "censored_excluded", m.censored_excluded },
                              { "train_rmse", m.train_rmse },
                              { "test_rmse", m.test_rmse },
                              { "mean_predictor_rmse", m.mean_predictor_rmse },
                              { "test_spearman", m.test_spearman },
                              { "label_std", m.label_std },
                              { "max_shift_on_corpus", m.max_shift_on_corpus } };
  return doc.dump( 1 ) + "\n";
}

} // namespace secsyn
