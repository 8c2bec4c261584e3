"""Load the samples to compare from CSV files.

Rows are observations. The group column holds the labels, the columns starting
with the covariate prefix are the covariates in regression mode, and every other
column is a feature.
"""

import logging
from pathlib import Path
from typing import List, Union

import pandas as pd

from ..model import (
    InputError,
    PooledSample,
    RegressionSample,
    validate_regression_sample,
    validate_sample,
)

log = logging.getLogger(__name__)

# The header is the first line of the file.
FIRST_DATA_LINE = 2


class CSVParseError(InputError):
    """Raised when the CSV file can't be read as a sample."""


class MixedTypeError(CSVParseError):
    """Raised when a column mixes numeric and non numeric cells."""


def _read_table(path: Union[str, Path]) -> pd.DataFrame:
    """Read every cell of the file as a string."""
    try:
        return pd.read_csv(
            path, dtype=str, keep_default_na=False, encoding="utf-8", sep=","
        )
    except FileNotFoundError as error:
        raise CSVParseError(f"The file {path} does not exist") from error
    except pd.errors.EmptyDataError as error:
        raise CSVParseError(f"The file {path} is empty") from error
    except (pd.errors.ParserError, UnicodeDecodeError) as error:
        raise CSVParseError(f"The file {path} is not a valid CSV: {error}") from error


def _numeric_column(table: pd.DataFrame, column: str) -> pd.Series:
    """Parse a column as floats.

    Raises:
        CSVParseError: if a cell is empty or the column isn't numeric.
        MixedTypeError: if only some of the cells are numeric.
    """
    cells = table[column].str.strip()
    empty = cells == ""
    if empty.any():
        row = int(empty.to_numpy().nonzero()[0][0])
        raise CSVParseError(
            f"Empty cell in line {row + FIRST_DATA_LINE}, column {column}"
        )
    values = pd.to_numeric(cells, errors="coerce")
    failed = values.isna() & (cells.str.lower() != "nan")
    if failed.any():
        row = int(failed.to_numpy().nonzero()[0][0])
        location = (
            f"line {row + FIRST_DATA_LINE}, column {column}: "
            f"{table[column].iloc[row]!r}"
        )
        if failed.all():
            raise CSVParseError(f"Non numeric value in {location}")
        raise MixedTypeError(f"Column {column} mixes numbers and text, see {location}")
    return values.astype(float)


def ingest_csv(
    path: Union[str, Path],
    group_column: str = "group",
    covariate_prefix: str = "w_",
    regression: bool = False,
) -> Union[PooledSample, RegressionSample]:
    """Load a pooled or a regression sample from a CSV file.

    Args:
        path: CSV file, UTF-8 encoded, comma delimited, with a header row.
        group_column: Name of the column with the group labels.
        covariate_prefix: Prefix of the covariate columns in regression mode.
        regression: Split the covariates from the features.

    Raises:
        CSVParseError: if the file can't be parsed.
        InputError: if the parsed data is not a valid sample.
    """
    table = _read_table(path)
    if group_column not in table.columns:
        raise CSVParseError(
            f"The file {path} has no {group_column} column, "
            f"found: {', '.join(table.columns)}"
        )
    labels = table[group_column].str.strip()
    if (labels == "").any():
        row = int((labels == "").to_numpy().nonzero()[0][0])
        raise CSVParseError(f"Missing group label in line {row + FIRST_DATA_LINE}")

    columns = [column for column in table.columns if column != group_column]
    if regression:
        covariates = [c for c in columns if str(c).startswith(covariate_prefix)]
        features = [c for c in columns if c not in covariates]
        if not covariates:
            raise CSVParseError(
                f"Regression mode needs columns starting with {covariate_prefix!r}"
            )
    else:
        covariates, features = [], columns
    if not features:
        raise CSVParseError(f"The file {path} has no feature columns")

    numeric = pd.DataFrame(
        {column: _numeric_column(table, column) for column in columns}
    )
    log.debug(
        f"Read {len(table)} observations with {len(features)} features "
        f"and {len(covariates)} covariates from {path}"
    )
    if not regression:
        return validate_sample(numeric[features].to_numpy().T, labels.tolist())

    order: List[str] = list(dict.fromkeys(labels.tolist()))
    responses = [numeric.loc[labels == label, features].to_numpy().T for label in order]
    design = [numeric.loc[labels == label, covariates].to_numpy() for label in order]
    return validate_regression_sample(responses, design, order)
