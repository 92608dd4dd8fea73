#pragma once

#include <secsyn/aig.hpp>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

namespace secsyn::test
{

inline std::filesystem::path benchmark_dir()
{
  return SECSYN_BENCHMARK_DIR;
}

inline std::vector<std::filesystem::path> benchmark_files()
{
  std::vector<std::filesystem::path> files;
  for ( auto const& entry : std::filesystem::directory_iterator( benchmark_dir() ) )
  {
    if ( entry.path().extension() == ".aag" )
      files.push_back( entry.path() );
  }
  std::sort( files.begin(), files.end() );
  return files;
}

/* ((a & b) & c) & d */
inline aig and_chain4()
{
  aig g( 4 );
  auto x = g.add_and( g.input( 0 ), g.input( 1 ) );
  x = g.add_and( x, g.input( 2 ) );
  x = g.add_and( x, g.input( 3 ) );
  g.add_output( x );
  return g;
}

inline aig and_tree4()
{
  aig g( 4 );
  auto const l = g.add_and( g.input( 0 ), g.input( 1 ) );
  auto const r = g.add_and( g.input( 2 ), g.input( 3 ) );
  g.add_output( g.add_and( l, r ) );
  return g;
}

} // namespace secsyn::test
