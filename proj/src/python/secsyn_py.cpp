#include <secsyn/pipeline.hpp>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace secsyn;

namespace
{

py::dict features_dict( feature_vector const& f )
{
  py::dict d;
  d["f1"] = f.f1_overall_diversity;
  d["f2"] = f.f2_lvt_area_pct;
  d["f3"] = f.f3_hvt_area_pct;
  return d;
}

py::dict report_dict( pt_score_report const& r )
{
  py::dict d;
  d["pt_score"] = r.value_or_cap();
  d["censored"] = r.censored();
  return d;
}

py::dict ppa_dict( ppa_report const& p )
{
  py::dict d;
  d["area"] = p.area;
  d["power"] = p.static_power;
  d["delay"] = p.delay;
  return d;
}

experiment_config config_of( std::optional<std::string> const& json )
{
  return json ? config_from_json( *json ) : experiment_config{};
}

} // namespace

PYBIND11_MODULE( _secsyn, m )
{
  m.doc() = "Security-first logic synthesis: AIG recipes, power-attack scoring, surrogate training and MCTS recipe search";

  py::register_exception<config_error>( m, "ConfigError", PyExc_ValueError );
  py::register_exception<verification_error>( m, "VerificationError" );
  py::register_exception<recipe_error>( m, "RecipeError", PyExc_ValueError );
  py::register_exception<predictor_error>( m, "PredictorError", PyExc_ValueError );
  py::register_exception<search_error>( m, "SearchError", PyExc_ValueError );
  py::register_exception<attack_error>( m, "AttackError", PyExc_ValueError );

  m.def( "action_names", []() {
    std::vector<std::string> out;
    for ( auto const& a : action_set() )
      out.push_back( a.name );
    return out;
  } );
  m.def( "parse_recipe", []( std::string const& text ) { return parse_recipe( text ); } );
  m.def( "format_recipe", []( recipe const& r ) { return format_recipe( r ); } );
  m.def( "baseline_recipe", []() { return format_recipe( compress2rs_like_recipe() ); } );

  m.def( "uct_score", &uct_score, py::arg( "reward_sum" ), py::arg( "visits" ), py::arg( "parent_visits" ), py::arg( "c" ) );
  m.def( "normalize_reward", &normalize_reward, py::arg( "pt" ), py::arg( "pt_threshold" ) );
  m.def( "pearson", []( std::vector<double> const& x, std::vector<double> const& y ) { return pearson( x, y ); } );
  m.def( "spearman", &spearman );
  m.def( "rmse", &rmse );
  m.def( "hamming_weight", &hamming_weight );
  m.def( "aes_sbox", []() {
    auto const& s = aes_sbox();
    return std::vector<uint32_t>( s.begin(), s.end() );
  } );

  m.def( "default_config", []() { return config_to_json( {} ); } );
  m.def( "config_hash", []( std::string const& json ) { return config_hash( config_from_json( json ) ); } );

  py::class_<pipeline_context>( m, "Context" )
      .def( py::init( []( std::optional<std::string> const& json ) { return make_context( config_of( json ) ); } ), py::arg( "config_json" ) = py::none() )
      .def_property_readonly( "config_json", []( pipeline_context const& c ) { return config_to_json( c.cfg ); } )
      .def( "design_stats",
            []( pipeline_context const& c, std::string const& r ) {
              auto const s = stats( apply_recipe( c.design, parse_recipe( r ) ) );
              py::dict d;
              d["ands"] = s.and_count;
              d["depth"] = s.depth;
              d["inputs"] = s.input_count;
              d["outputs"] = s.output_count;
              return d;
            },
            py::arg( "recipe" ) = "" )
      .def( "features", []( pipeline_context const& c, std::string const& r ) { return features_dict( recipe_features( c.design, c.lib, parse_recipe( r ) ) ); } )
      .def( "label",
            []( pipeline_context const& c, std::string const& r ) {
              py::gil_scoped_release release;
              auto const s = label_recipe( c, parse_recipe( r ) );
              return std::make_pair( s.label, s.censored );
            } )
      .def(
          "evaluate",
          []( pipeline_context const& c, std::string const& r, std::string const& cm ) {
            recipe_evaluation e;
            {
              py::gil_scoped_release release;
              e = evaluate_recipe( c, parse_recipe( r ), parse_countermeasure( cm ) );
            }
            py::dict d;
            d["recipe"] = format_recipe( e.actions );
            d["countermeasure"] = cm;
            d["features"] = features_dict( e.features );
            d["pre"] = report_dict( e.pre );
            d["post"] = report_dict( e.post );
            d["pre_ppa"] = ppa_dict( e.pre_ppa );
            d["post_ppa"] = ppa_dict( e.post_ppa );
            return d;
          },
          py::arg( "recipe" ), py::arg( "countermeasure" ) = "none" );

  py::class_<surrogate_model>( m, "Model" )
      .def_static( "from_json", &model_from_json )
      .def( "to_json", &model_to_json )
      .def_property_readonly( "trees", []( surrogate_model const& s ) { return s.trees.size(); } )
      .def( "predict", []( surrogate_model const& s, double f1, double f2, double f3 ) { return predict( s, feature_vector{ f1, f2, f3 } ); } );

  m.def(
      "train",
      []( std::vector<std::tuple<std::string, double, double, double, double, bool>> const& rows, uint64_t seed ) {
        std::vector<labeled_sample> data;
        for ( auto const& [r, f1, f2, f3, label, censored] : rows )
          data.push_back( { parse_recipe( r ), { f1, f2, f3 }, label, censored } );
        auto const t = train( data, {}, seed );
        py::dict metrics;
        metrics["train_samples"] = t.metrics.train_samples;
        metrics["test_samples"] = t.metrics.test_samples;
        metrics["censored_excluded"] = t.metrics.censored_excluded;
        metrics["test_rmse"] = t.metrics.test_rmse;
        metrics["mean_predictor_rmse"] = t.metrics.mean_predictor_rmse;
        metrics["test_spearman"] = t.metrics.test_spearman;
        return std::make_pair( t.model, metrics );
      },
      py::arg( "rows" ), py::arg( "seed" ) = 1 );

  m.def(
      "mcts_search",
      []( std::function<double( std::string const& )> const& scorer, uint32_t iterations, double threshold, uint64_t seed, uint32_t horizon ) {
        search_params p;
        p.iterations = iterations;
        p.pt_threshold = threshold;
        p.seed = seed;
        p.horizon = horizon;
        auto const r = mcts_search( [&]( recipe const& x ) { return scorer( format_recipe( x ) ); }, p );
        py::dict d;
        d["root_visits"] = r.tree[0].visits;
        d["nodes"] = r.tree.size();
        d["best"] = format_recipe( extract_best_recipe( r, extraction_policy::most_visited, horizon ) );
        d["progress_csv"] = progress_to_csv( r );
        return d;
      },
      py::arg( "scorer" ), py::arg( "iterations" ), py::arg( "threshold" ), py::arg( "seed" ) = 1, py::arg( "horizon" ) = default_horizon );
}
