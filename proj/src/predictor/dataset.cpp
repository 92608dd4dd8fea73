#include <secsyn/predictor.hpp>

#include <sstream>

namespace secsyn
{

namespace
{

std::vector<std::string> split( std::string const& line, char sep )
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is( line );
  while ( std::getline( is, cur, sep ) )
    out.push_back( cur );
  if ( !line.empty() && line.back() == sep )
    out.emplace_back();
  return out;
}

double parse_number( std::string const& s, std::size_t line )
{
  try
  {
    std::size_t used = 0;
    auto const v = std::stod( s, &used );
    if ( used != s.size() )
      throw std::invalid_argument( s );
    return v;
  }
  catch ( std::exception const& )
  {
    throw predictor_error( "dataset line " + std::to_string( line ) + ": bad number '" + s + "'" );
  }
}

} // namespace

std::string dataset_to_csv( std::vector<labeled_sample> const& samples )
{
  std::ostringstream os;
  os.precision( 17 );
  os << "recipe,f1,f2,f3,label,censored\n";
  for ( auto const& s : samples )
  {
    os << format_recipe( s.actions ) << ',' << s.features.f1_overall_diversity << ',' << s.features.f2_lvt_area_pct << ','
       << s.features.f3_hvt_area_pct << ',' << s.label << ',' << ( s.censored ? 1 : 0 ) << '\n';
  }
  return os.str();
}

std::vector<labeled_sample> dataset_from_csv( std::string const& text )
{
  std::istringstream is( text );
  std::string line;
  std::vector<labeled_sample> out;
  bool header = false;
  std::size_t number = 0;
  while ( std::getline( is, line ) )
  {
    ++number;
    if ( !line.empty() && line.back() == '\r' )
      line.pop_back();
    if ( line.empty() || line[0] == '#' )
      continue;
    if ( !header )
    {
      if ( line != "recipe,f1,f2,f3,label,censored" )
        throw predictor_error( "dataset: unexpected header '" + line + "'" );
      header = true;
      continue;
    }
    auto const cols = split( line, ',' );
    if ( cols.size() != 6u )
      throw predictor_error( "dataset line " + std::to_string( number ) + ": expected 6 columns" );
    labeled_sample s;
    try
    {
      s.actions = parse_recipe( cols[0] );
    }
    catch ( recipe_error const& e )
    {
      throw predictor_error( "dataset line " + std::to_string( number ) + ": " + e.what() );
    }
    s.features.f1_overall_diversity = parse_number( cols[1], number );
    s.features.f2_lvt_area_pct = parse_number( cols[2], number );
    s.features.f3_hvt_area_pct = parse_number( cols[3], number );
    s.label = parse_number( cols[4], number );
    if ( cols[5] != "0" && cols[5] != "1" )
      throw predictor_error( "dataset line " + std::to_string( number ) + ": censored must be 0 or 1" );
    s.censored = cols[5] == "1";
    out.push_back( std::move( s ) );
  }
  if ( !header )
    throw predictor_error( "dataset: missing header" );
  return out;
}

} // namespace secsyn
