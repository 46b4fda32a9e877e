import functools
import glob
import itertools
import os


def zip_dicts(*dicts):
    """Given a list of dictionaries, zip their corresponding
    values and return the resulting dictionary"""
    return {key: [dictionary[key] for dictionary in dicts] for key in dicts[0].keys()}


def dict_combinations(*dict_list_lists):
    """Given a list of lists of dictionaries return the list of
    all possible dictionaries resulting from the unions of sampling
    a dictionary from each list.

    The order is that of itertools.product: the last list varies fastest.
    """
    combinations = itertools.product(*dict_list_lists)  # cartesian product of all the lists
    return [functools.reduce(lambda a, b: {**a, **b}, comb, {}) for comb in combinations]


def split_list(text, separator=','):
    """Splits a comma separated option value, dropping blanks"""
    return [item.strip() for item in text.split(separator) if item.strip()]


def list_csv_files(directory):
    """CSV files of a directory, sorted by name"""
    if not os.path.isdir(directory):
        raise FileNotFoundError('no such directory: {}'.format(directory))
    return sorted(glob.glob(os.path.join(directory, '*.csv')))
