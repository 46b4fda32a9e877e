"""Command line script for live-streaming simulations"""
import functools
import os
import pprint

import click
import click_log

from livesim.config import load_config, parse_value
from livesim.controllers import parse_scheme
from livesim.generation import write_suite
from livesim.harness import MatrixRunError, prediction_table, run_matrix, run_one, summary_table, write_results
from livesim.log import logger
from livesim.traces import BUNDLED_VIDEO, load_network_trace, load_video_trace, trace_id
from livesim.utils.general import list_csv_files, split_list


def config_options(command):
    """Adds the --config file and repeated -p KEY VALUE options"""
    command = click.option('cli_params', '-p', '--param', type=(str, str), metavar='KEY VALUE', multiple=True,
                           help='A configuration value given as "key value". '
                                'Values are given as json values, bare words are strings. '
                                'Can be passed multiple times.')(command)
    command = click.option('config_file', '-c', '--config', metavar='CONFIG_FILE', default=None,
                           type=click.Path(file_okay=True, dir_okay=False, exists=True),
                           help='A "key = value" file of configuration values')(command)
    return command


def reported_errors(command):
    """Turns input and run errors into click errors so they are printed once"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (ValueError, LookupError, OSError, MatrixRunError) as e:
            raise click.ClickException(str(e))

    return wrapper


def get_config(config_file, cli_params):
    overrides = {key: parse_value(value) for key, value in cli_params}
    cfg = load_config(config_file, overrides)
    logger.debug('Using configuration:\n{}'.format(pprint.pformat(cfg)))
    return cfg


def load_videos(paths, cfg):
    return {trace_id(path): load_video_trace(path, frame_duration=cfg.frame_duration,
                                             gop_length=cfg.gop_length, ladder=cfg.ladder)
            for path in paths}


@click.group()
def script():
    """Trace-driven adaptive live-streaming simulation"""
    pass


@script.command(short_help='simulate one run')
@click_log.simple_verbosity_option(logger)
@click.option('--video', metavar='VIDEO_FILE', default=BUNDLED_VIDEO, show_default=False,
              type=click.Path(file_okay=True, dir_okay=False, exists=True),
              help='The video trace CSV (default: the bundled synthetic trace)')
@click.option('--network', metavar='NETWORK_FILE', required=True,
              type=click.Path(file_okay=True, dir_okay=False, exists=True), help='The network trace CSV')
@click.option('--scheme', metavar='SCHEME', default=None,
              help='HYSA, HYSA-N, LOOKAHEAD, BUFFER-THRESHOLD or FIXED(level)(default: the configured controller)')
@click.option('out', '--out', metavar='OUTPUT_DIR', required=True,
              type=click.Path(dir_okay=True, file_okay=False, writable=True),
              help='Where to write frames.csv, segments.csv and summary.csv')
@config_options
@reported_errors
def simulate(video, network, scheme, out, config_file, cli_params):
    """Replays NETWORK_FILE against VIDEO_FILE with one scheme and writes the logs."""
    cfg = get_config(config_file, cli_params)
    scheme = scheme or cfg.controller
    parse_scheme(scheme)  # fail early on a typo

    logger.info('Loading the traces')
    video_id = trace_id(video)
    videos = load_videos([video], cfg)
    net = load_network_trace(network)

    logger.info('Simulating {} over {} with {}'.format(video_id, trace_id(network), scheme))
    summary, log = run_one(videos[video_id], net, scheme, cfg, video_id=video_id, network_id=trace_id(network))

    os.makedirs(out, exist_ok=True)
    log.write(out)
    summary_table([summary]).to_csv(os.path.join(out, 'summary.csv'), index=False)
    logger.info('Overall QoE {:.2f} ({} stalls, {} skips)'.format(summary.breakdown.overall, summary.stalls,
                                                                   summary.skips))
    logger.info('DONE')


@script.command(short_help='simulate a matrix of runs')
@click_log.simple_verbosity_option(logger)
@click.option('--videos', metavar='VIDEOS_DIR', required=True,
              type=click.Path(dir_okay=True, file_okay=False, exists=True), help='A directory of video trace CSVs')
@click.option('--networks', metavar='NETWORKS_DIR', required=True,
              type=click.Path(dir_okay=True, file_okay=False, exists=True), help='A directory of network trace CSVs')
@click.option('--schemes', metavar='SCHEMES', default='HYSA,HYSA-N,LOOKAHEAD,BUFFER-THRESHOLD',
              help='Comma separated scheme ids(default HYSA,HYSA-N,LOOKAHEAD,BUFFER-THRESHOLD)')
@click.option('out', '--out', metavar='OUTPUT_DIR', required=True,
              type=click.Path(dir_okay=True, file_okay=False, writable=True),
              help='Where to write summary.csv and the cdf_<metric>.csv files')
@click.option('-n', '--num-workers', metavar='NUM_WORKERS', type=click.INT,
              default=1, help='The number of worker processes(default 1)')
@config_options
@reported_errors
def batch(videos, networks, schemes, out, num_workers, config_file, cli_params):
    """Runs every scheme over every video and network trace."""
    cfg = get_config(config_file, cli_params)
    scheme_list = split_list(schemes)
    for scheme in scheme_list:
        parse_scheme(scheme)

    logger.info('Loading the traces')
    video_traces = load_videos(list_csv_files(videos), cfg)
    network_traces = {trace_id(path): load_network_trace(path) for path in list_csv_files(networks)}

    summaries = run_matrix(video_traces, network_traces, scheme_list, cfg, num_workers=num_workers)
    write_results(summaries, out)
    logger.info('DONE')


@script.command('gen-traces', short_help='generate the synthetic suite')
@click_log.simple_verbosity_option(logger)
@click.option('--seed', metavar='SEED', type=click.INT, default=0, help='The random seed to use(default 0)')
@click.option('out', '--out', metavar='OUTPUT_DIR', required=True,
              type=click.Path(dir_okay=True, file_okay=False, writable=True),
              help='Where to create videos/ and networks/')
@reported_errors
def gen_traces(seed, out):
    """Generates the seeded synthetic video and network traces."""
    write_suite(out, seed=seed)
    logger.info('DONE')


@script.command('prediction-error', short_help='compare bitrate predictors')
@click_log.simple_verbosity_option(logger)
@click.option('--videos', metavar='VIDEOS_DIR', required=True,
              type=click.Path(dir_okay=True, file_okay=False, exists=True), help='A directory of video trace CSVs')
@config_options
@reported_errors
def prediction_error(videos, config_file, cli_params):
    """Prints the KAMA and coding-bitrate prediction error of every video."""
    cfg = get_config(config_file, cli_params)
    table = prediction_table(load_videos(list_csv_files(videos), cfg), cfg)
    click.echo(table.to_string(index=False))


if __name__ == '__main__':
    script()
